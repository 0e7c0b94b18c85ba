use super::subsets::{check_budget, check_k, RatioTable};
use super::{Direction, TestVerdict, Witness, ENUMERATION_BUDGET};
use crate::distributions::DistributionPair;
use crate::error::Result;
use crate::model::WeightedGraph;

/// Scan test: the largest log-likelihood ratio of any planted `k`-set,
/// `max_S sum_{e in E(S)} ln(q(X_e)/p(X_e))`, against `k ln n`.
///
/// Exhaustive over all `C(n, k)` subsets. A subset whose edges include a
/// `+inf` ratio and no `-inf` ratio scores `+inf`; among those the one with
/// the most `+inf` edges is the witness. Ties keep the lexicographically
/// first subset.
pub fn scan_test(g: &WeightedGraph, pair: &DistributionPair, k: usize) -> Result<TestVerdict> {
    scan_test_with_budget(g, pair, k, ENUMERATION_BUDGET)
}

pub fn scan_test_with_budget(g: &WeightedGraph, pair: &DistributionPair, k: usize, budget: f64) -> Result<TestVerdict> {
    let n = g.n();
    check_k(n, k)?;
    check_budget(n, k, budget)?;
    let table = RatioTable::new(g, pair)?;

    let mut best_pos = 0usize;
    let mut best_sum = f64::NEG_INFINITY;
    let mut best: Vec<usize> = (0..k).collect();
    table.walk(k, |s, sum, pos| {
        if pos > best_pos || (pos == best_pos && sum > best_sum) {
            best_pos = pos;
            best_sum = sum;
            best.clear();
            best.extend_from_slice(s);
        }
    });

    let statistic = if best_pos > 0 { f64::INFINITY } else { best_sum };
    let threshold = k as f64 * (n as f64).ln();
    let witness = Witness { vertices: best, interval: None };
    Ok(TestVerdict::new("scan", statistic, threshold, Direction::Above, Some(witness)))
}
