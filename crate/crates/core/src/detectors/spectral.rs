use super::{Direction, TestVerdict};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm_with, CenteredAdjacency, NormMethod};
use crate::model::WeightedGraph;
use crate::region::Region;

/// Relative accuracy of the operator norm.
pub const SPECTRAL_REL_TOL: f64 = 1e-8;

/// `4 (b - a) sqrt(n ln 9 + ln(4 / delta))`.
pub fn spectral_threshold(n: usize, width: f64, delta: f64) -> f64 {
    4.0 * width * (9f64.ln() * n as f64 + (4.0 / delta).ln()).sqrt()
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} outside (0, 1)")));
    }
    Ok(())
}

/// Spectral test on the raw weights: reject iff
/// `||X - mu_p (J - I)|| > 4 (b - a) sqrt(n ln 9 + ln(4 / delta))`.
pub fn spectral_test_t2(g: &WeightedGraph, mu_p: f64, support: (f64, f64), delta: f64) -> Result<TestVerdict> {
    spectral_test_t2_with(g, mu_p, support, delta, NormMethod::default())
}

pub fn spectral_test_t2_with(
    g: &WeightedGraph,
    mu_p: f64,
    support: (f64, f64),
    delta: f64,
    method: NormMethod,
) -> Result<TestVerdict> {
    check_delta(delta)?;
    let (a, b) = support;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::param("support", format!("[{a}, {b}] must be a bounded interval")));
    }
    if !mu_p.is_finite() {
        return Err(Error::param("mu_p", "must be finite"));
    }
    if let Some(&weight) = g.weights().iter().find(|&&w| !(w >= a && w <= b)) {
        return Err(Error::WeightOutOfSupport { weight, lo: a, hi: b });
    }
    run(g, mu_p, b - a, delta, method, "t2")
}

/// Spectral test on the indicator graph `Z_ij = 1{X_ij in A}`: the T2 test
/// applied to `Z` with null mean `p_of_a = P(A)` and support `[0, 1]`.
pub fn spectral_test_t1(g: &WeightedGraph, set: &Region, p_of_a: f64, delta: f64) -> Result<TestVerdict> {
    if !(0.0..=1.0).contains(&p_of_a) {
        return Err(Error::param("p_of_a", format!("{p_of_a} outside [0, 1]")));
    }
    check_delta(delta)?;
    let z = g.map(|w| if set.contains(w) { 1.0 } else { 0.0 });
    run(&z, p_of_a, 1.0, delta, NormMethod::default(), "t1")
}

fn run(g: &WeightedGraph, mu: f64, width: f64, delta: f64, method: NormMethod, name: &'static str) -> Result<TestVerdict> {
    let op = CenteredAdjacency { graph: g, mu };
    let norm = operator_norm_with(&op, SPECTRAL_REL_TOL, method)?;
    let threshold = spectral_threshold(g.n(), width, delta);
    Ok(TestVerdict::new(name, norm.value, threshold, Direction::Above, None))
}
