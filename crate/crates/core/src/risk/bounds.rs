use serde::Serialize;

use crate::combinatorics::{ln_choose, log_sum_exp, pairs};
use crate::detectors::spectral_threshold;
use crate::distributions::DistributionPair;
use crate::divergences::divergences;
use crate::error::{Error, Result};

/// `E0[L^2]` for a planted set of size `k` with `rho = 1 + chi^2(Q || P)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondMoment {
    #[serde(with = "crate::serde_ext")]
    pub value: f64,
    #[serde(with = "crate::serde_ext")]
    pub log_value: f64,
    /// The same sum without its `i = 0` term; an upper bound on
    /// `E0[L^2] - 1`.
    #[serde(with = "crate::serde_ext")]
    pub excess_bound: f64,
    /// `1 - sqrt(E0[L^2] - 1)`, clamped to `[0, 1]`.
    pub risk_lower_bound: f64,
}

/// `E0[L^2] = sum_i C(k,i) C(n-k,k-i) / C(n,k) * rho^C(i,2)`, the overlap
/// `i = |S ∩ S'|` of two independent planted sets being hypergeometric.
/// Summed in log space.
pub fn second_moment(n: usize, k: usize, rho: f64) -> Result<SecondMoment> {
    if !(rho >= 1.0) {
        return Err(Error::param("rho", format!("{rho} < 1")));
    }
    if k < 2 || k > n {
        return Err(Error::param("k", format!("{k} outside [2, {n}]")));
    }
    let (n64, k64) = (n as u64, k as u64);
    let ln_total = ln_choose(n64, k64);
    let ln_rho = rho.ln();
    let terms: Vec<f64> = (0..=k)
        .map(|i| {
            let i64_ = i as u64;
            let overlap = ln_choose(k64, i64_) + ln_choose(n64 - k64, k64 - i64_) - ln_total;
            if overlap == f64::NEG_INFINITY {
                return overlap;
            }
            let pairs_i = pairs(i) as f64;
            overlap + if pairs_i == 0.0 { 0.0 } else { pairs_i * ln_rho }
        })
        .collect();
    let log_value = log_sum_exp(&terms);
    let value = log_value.exp();
    let excess_bound = log_sum_exp(&terms[1..]).exp();
    let risk_lower_bound = (1.0 - (value - 1.0).max(0.0).sqrt()).clamp(0.0, 1.0);
    Ok(SecondMoment { value, log_value, excess_bound, risk_lower_bound })
}

/// `1 - sqrt(1 - BC^(2 C(k,2)))` from the Bhattacharyya coefficient.
pub fn bc_bound(bc: f64, k: usize) -> f64 {
    let e = 2.0 * pairs(k) as f64;
    1.0 - (1.0 - bc.powf(e)).max(0.0).sqrt()
}

/// Lower bound on the optimal risk through `E0[sqrt L] >= BC(P,Q)^C(k,2)`.
pub fn bc_risk_lower_bound(k: usize, pair: &DistributionPair) -> Result<f64> {
    if k < 2 {
        return Err(Error::param("k", format!("{k} < 2")));
    }
    Ok(bc_bound(divergences(pair)?.bhattacharyya, k))
}

/// Every closed-form threshold for one `(n, P, Q)`.
///
/// The `(1 + o(1))` factors of the spectral guarantees are set to 1, so the
/// spectral `k` values hold only asymptotically (`asymptotic_slack`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Constant of the `c ln n` fallback used when the KL divergence is infinite.
    pub c: f64,
    #[serde(with = "crate::serde_ext")]
    pub kl: f64,
    #[serde(with = "crate::serde_ext")]
    pub rho: f64,
    pub tv: f64,
    pub bhattacharyya: f64,
    #[serde(with = "crate::serde_ext")]
    pub mean_gap: f64,
    #[serde(with = "crate::serde_ext")]
    pub support_width: f64,
    /// `(2 + epsilon) ln n / KL`: the scan test succeeds above it.
    pub kl_threshold_k: f64,
    pub kl_fallback: bool,
    /// `2 log_rho n - 2 log_rho log_rho n - 1 + 2 log_rho e`.
    pub omega_n: f64,
    /// `floor(omega_n - epsilon)`: planted sets up to this size are
    /// asymptotically undetectable.
    pub chi2_indist_k: i64,
    /// Norm threshold of T1, `4 sqrt(n ln 9 + ln(4/delta))`.
    pub t1_norm_threshold: f64,
    /// Norm threshold of T2, `(b - a)` times the T1 one.
    #[serde(with = "crate::serde_ext")]
    pub t2_norm_threshold: f64,
    #[serde(with = "crate::serde_ext")]
    pub spectral_k_t1: f64,
    #[serde(with = "crate::serde_ext")]
    pub spectral_k_t2: f64,
    /// Planted-set size at which `bc_risk_lower_bound` is evaluated.
    pub bc_k: usize,
    pub bc_risk_lower_bound: f64,
    pub asymptotic_slack: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptions {
    pub c: f64,
    /// Size for the Bhattacharyya bound; defaults to `max(2, chi2_indist_k)`.
    pub bc_k: Option<usize>,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions { c: 1.0, bc_k: None }
    }
}

pub fn thresholds(n: usize, pair: &DistributionPair, epsilon: f64, delta: f64) -> Result<ThresholdReport> {
    thresholds_with(n, pair, epsilon, delta, ThresholdOptions::default())
}

pub fn thresholds_with(
    n: usize,
    pair: &DistributionPair,
    epsilon: f64,
    delta: f64,
    opts: ThresholdOptions,
) -> Result<ThresholdReport> {
    if n < 3 {
        return Err(Error::param("n", format!("{n} < 3")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::param("epsilon", format!("{epsilon} must be positive")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} outside (0, 1)")));
    }
    if !(opts.c > 0.0) {
        return Err(Error::param("c", format!("{} must be positive", opts.c)));
    }
    let d = divergences(pair)?;
    if !(d.chi2 > 0.0) {
        return Err(Error::param("pair", "rho = 1: P and Q coincide"));
    }
    let ln_n = (n as f64).ln();

    let kl_fallback = d.kl.is_infinite();
    let kl_threshold_k = if kl_fallback { opts.c * ln_n } else { (2.0 + epsilon) * ln_n / d.kl };

    let omega_n = omega(n, d.rho);
    let chi2_indist_k = (omega_n - epsilon).floor() as i64;

    let t1_norm_threshold = spectral_threshold(n, 1.0, delta);
    let (lo, hi) = pair.support_hull();
    let support_width = hi - lo;
    let t2_norm_threshold = spectral_threshold(n, support_width, delta);
    let mean_gap = (pair.q.mean() - pair.p.mean()).abs();
    let spectral_k_t1 = if d.tv > 0.0 { t1_norm_threshold / d.tv } else { f64::INFINITY };
    let spectral_k_t2 = if support_width.is_finite() && mean_gap > 0.0 {
        t2_norm_threshold / mean_gap
    } else {
        f64::INFINITY
    };

    let bc_k = opts.bc_k.unwrap_or(chi2_indist_k.max(2) as usize);
    if bc_k < 2 {
        return Err(Error::param("bc_k", format!("{bc_k} < 2")));
    }
    Ok(ThresholdReport {
        n,
        epsilon,
        delta,
        c: opts.c,
        kl: d.kl,
        rho: d.rho,
        tv: d.tv,
        bhattacharyya: d.bhattacharyya,
        mean_gap,
        support_width,
        kl_threshold_k,
        kl_fallback,
        omega_n,
        chi2_indist_k,
        t1_norm_threshold,
        t2_norm_threshold,
        spectral_k_t1,
        spectral_k_t2,
        bc_k,
        bc_risk_lower_bound: bc_bound(d.bhattacharyya, bc_k),
        asymptotic_slack: true,
    })
}

/// `omega_n`; tends to `-1` as `rho -> inf`.
pub fn omega(n: usize, rho: f64) -> f64 {
    if rho.is_infinite() {
        return -1.0;
    }
    let lr = rho.ln();
    let log_n = (n as f64).ln() / lr;
    2.0 * log_n - 2.0 * log_n.ln() / lr - 1.0 + 2.0 / lr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named_pair;

    #[test]
    fn second_moment_at_rho_one() {
        let (n, k) = (20, 5);
        let s = second_moment(n, k, 1.0).unwrap();
        assert!((s.value - 1.0).abs() < 1e-13);
        let vandermonde = 1.0 - (ln_choose(15, 5) - ln_choose(20, 5)).exp();
        assert!((s.excess_bound - vandermonde).abs() < 1e-13);
        assert_eq!(s.risk_lower_bound, 1.0);
    }

    #[test]
    fn single_subset() {
        let s = second_moment(6, 6, 2.0).unwrap();
        assert!((s.value - 2f64.powi(15)).abs() < 1e-9);
    }

    #[test]
    fn second_moment_errors() {
        assert!(second_moment(6, 3, 0.5).is_err());
        assert!(second_moment(6, 7, 2.0).is_err());
        assert!(second_moment(6, 1, 2.0).is_err());
    }

    #[test]
    fn omega_for_the_clique_pair() {
        let w = omega(1024, 2.0);
        let want = 20.0 - 2.0 * 10f64.log2() - 1.0 + 2.0 * std::f64::consts::E.log2();
        assert!((w - want).abs() < 1e-12);
        assert!((w - 15.2415).abs() < 1e-3);
    }

    #[test]
    fn clique_pair_report() {
        let pair = named_pair("bernoulli_dirac", &[0.5]).unwrap();
        let r = thresholds(1024, &pair, 1.0, 0.1).unwrap();
        assert!((r.kl_threshold_k - 30.0).abs() < 1e-9);
        assert_eq!(r.chi2_indist_k, 14);
        assert!(!r.kl_fallback);
        let r = thresholds(4096, &pair, 1.0, 0.1).unwrap();
        assert!((r.spectral_k_t2 - 2.0 * spectral_threshold(4096, 1.0, 0.1)).abs() < 1e-9);
        assert!((r.spectral_k_t1 - r.spectral_k_t2).abs() < 1e-6);
    }

    #[test]
    fn singular_and_unbounded_pairs() {
        let pair = named_pair("disjoint_uniform", &[]).unwrap();
        let r = thresholds(100, &pair, 0.5, 0.1).unwrap();
        assert!(r.kl_fallback);
        assert!((r.kl_threshold_k - 100f64.ln()).abs() < 1e-12);
        assert_eq!(r.omega_n, -1.0);
        let g = named_pair("gaussian_shift", &[1.0]).unwrap();
        let r = thresholds(100, &g, 0.5, 0.1).unwrap();
        assert_eq!(r.spectral_k_t2, f64::INFINITY);
        assert!(r.spectral_k_t1.is_finite());
        let same = named_pair("bernoulli_bernoulli", &[0.4, 0.4]).unwrap();
        assert!(thresholds(100, &same, 0.5, 0.1).is_err());
    }

    #[test]
    fn bhattacharyya_bound() {
        assert_eq!(bc_bound(1.0, 7), 1.0);
        assert_eq!(bc_bound(0.0, 2), 0.0);
        let pair = named_pair("bernoulli_dirac", &[0.5]).unwrap();
        let b = bc_risk_lower_bound(3, &pair).unwrap();
        assert!((b - (1.0 - 0.875f64.sqrt())).abs() < 1e-9);
    }
}
