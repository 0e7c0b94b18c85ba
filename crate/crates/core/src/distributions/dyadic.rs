use super::Distribution;
use crate::error::{Error, Result};

/// Dyadic piecewise-constant density on `[0, 1)` driven by a nondecreasing
/// sequence `kprime = (k'_1, k'_2, ...)`.
///
/// On `[1/2, 1)` the density is `(1 - 1/k'_1) + 1/2`; on `[2^-m, 2^-(m-1))`
/// for `2 <= m <= depth` it is `2^(m-1) (1/k'_(m-1) - 1/k'_m) + 1/2`. The
/// mass the infinite construction puts below `2^-depth` is
/// `1/(2 k'_depth) + 2^-(depth+1)`; it is spread uniformly over
/// `[0, 2^-depth)`, so every dyadic cell down to `2^-depth` carries exactly
/// its untruncated mass.
pub fn dyadic_tail_density(kprime: &[u64], depth: usize) -> Result<Distribution> {
    if depth < 2 {
        return Err(Error::param("depth", format!("{depth} < 2")));
    }
    if depth > 1000 {
        return Err(Error::param("depth", format!("{depth} underflows the dyadic grid")));
    }
    if kprime.len() < depth {
        return Err(Error::param("kprime", format!("need {depth} terms, got {}", kprime.len())));
    }
    if kprime[0] < 1 {
        return Err(Error::param("kprime", "first term must be >= 1"));
    }
    if kprime.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("kprime", "sequence must be nondecreasing"));
    }
    let inv = |m: usize| 1.0 / kprime[m - 1] as f64;

    // Edges ascending: 0, 2^-depth, ..., 1/2, 1.
    let mut edges = vec![0.0];
    edges.extend((0..=depth).rev().map(|m| 0.5f64.powi(m as i32)));
    let mut values = Vec::with_capacity(depth + 1);
    values.push(2f64.powi(depth as i32 - 1) * inv(depth) + 0.5);
    for m in (2..=depth).rev() {
        values.push(2f64.powi(m as i32 - 1) * (inv(m - 1) - inv(m)) + 0.5);
    }
    values.push(1.0 - inv(1) + 0.5);
    let label = format!("DyadicTail(k'_1={}, depth={depth})", kprime[0]);
    Distribution::piecewise(edges, values, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Shape;
    use crate::quadrature::integrate;

    fn pieces(d: &Distribution) -> (Vec<f64>, Vec<f64>) {
        match &d.continuous().unwrap().shape {
            Shape::Piecewise { edges, values } => (edges.clone(), values.clone()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn doubling_sequence_top_piece() {
        let kp: Vec<u64> = (0..20).map(|m| 1u64 << m).collect();
        let d = dyadic_tail_density(&kp, 20).unwrap();
        assert_eq!(d.continuous_density(0.75), 0.5);
        // 2^(m-1)(2^-(m-2) - 2^-(m-1)) + 1/2 = 1 + 1/2.
        assert_eq!(d.continuous_density(0.3), 1.5);
        assert_eq!(d.continuous_density(0.01), 1.5);
    }

    #[test]
    fn constant_sequence_is_flat_below_one_half() {
        let d = dyadic_tail_density(&[5; 12], 12).unwrap();
        let (edges, values) = pieces(&d);
        for (w, v) in edges.windows(2).zip(&values).skip(1) {
            if w[1] <= 0.5 {
                assert_eq!(*v, 0.5, "piece [{}, {})", w[0], w[1]);
            }
        }
        assert!((d.continuous_density(0.75) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn integrates_to_one() {
        let seqs: Vec<Vec<u64>> = vec![
            (1..=40).collect(),
            (0..40).map(|m| 1u64 << m.min(62)).collect(),
            (1..=40u64).map(|m| m * m + 2).collect(),
        ];
        for kp in seqs {
            let d = dyadic_tail_density(&kp, 40).unwrap();
            let (edges, _) = pieces(&d);
            let v = integrate(|x| d.continuous_density(x), 0.0, 1.0, &edges).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn tail_cell_matches_untruncated_mass() {
        let kp: Vec<u64> = (1..=10).collect();
        let d = dyadic_tail_density(&kp, 10).unwrap();
        let tail = d.continuous_mass(0.0, 0.5f64.powi(10));
        assert!((tail - (1.0 / 20.0 + 0.5f64.powi(11))).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(dyadic_tail_density(&[3, 2, 4], 3).is_err());
        assert!(dyadic_tail_density(&[1, 2], 1).is_err());
        assert!(dyadic_tail_density(&[0, 2, 3], 3).is_err());
        assert!(dyadic_tail_density(&[1, 2], 3).is_err());
    }
}
