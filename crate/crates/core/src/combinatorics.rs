//! Binomial coefficients in log space and k-subset enumeration helpers.

use statrs::function::factorial::ln_binomial;

/// `C(n, k)` in integer arithmetic, `None` on overflow.
fn exact_choose(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `ln C(n, k)`, or `-inf` when `k > n`. Correctly rounded while `C(n, k)`
/// fits in 53 bits, log-gamma based beyond.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    match exact_choose(n, k) {
        Some(c) if c < 1 << 53 => (c as f64).ln(),
        _ => ln_binomial(n, k),
    }
}

/// `C(n, k)` as a float; exact while the value fits in 53 bits.
pub fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    match exact_choose(n, k) {
        Some(c) => c as f64,
        None => ln_binomial(n, k).exp(),
    }
}

/// Number of unordered pairs, `C(k, 2)`.
pub fn pairs(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Numerically stable `ln(sum(exp(xs)))`; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m == f64::INFINITY {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Iterate all k-subsets of `0..n` in lexicographic order, calling `visit`
/// with each sorted subset.
pub fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials_are_exact() {
        assert_eq!(choose(7, 3), 35.0);
        assert_eq!(choose(24, 6), 134_596.0);
        assert_eq!(choose(5, 0), 1.0);
        assert_eq!(choose(3, 5), 0.0);
        assert!((ln_choose(100, 10) - choose(100, 10).ln()).abs() < 1e-12);
    }

    #[test]
    fn lse_handles_infinities() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn subsets_lexicographic() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        for_each_subset(7, 3, |_| count += 1);
        assert_eq!(count, 35);
        let mut full = 0;
        for_each_subset(3, 3, |s| {
            assert_eq!(s, &[0, 1, 2]);
            full += 1
        });
        assert_eq!(full, 1);
    }

    #[test]
    fn compensated_sum() {
        let s: KahanSum = std::iter::once(1.0).chain(std::iter::repeat(1e-16).take(10_000)).collect();
        assert!((s.value() - (1.0 + 1e-12)).abs() < 1e-20);
    }
}
