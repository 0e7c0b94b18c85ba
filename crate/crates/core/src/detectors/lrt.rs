use super::subsets::{check_budget, check_k, RatioTable};
use super::{Direction, TestVerdict, Witness, ENUMERATION_BUDGET};
use crate::combinatorics::choose;
use crate::distributions::DistributionPair;
use crate::error::{Error, Result};
use crate::model::WeightedGraph;

/// Likelihood-ratio test. The statistic is
/// `ln L(X) = ln( C(n,k)^{-1} sum_S prod_{e in E(S)} q(X_e)/p(X_e) )`,
/// computed by a streaming log-sum-exp over every `k`-subset, and `H0` is
/// rejected iff `ln L > 0`.
///
/// When some weight has `p = 0 < q` the null likelihood vanishes: `L = +inf`
/// if a subset covers every such edge without containing a `q = 0` edge
/// (that subset is the witness), and otherwise the observation is
/// impossible under both hypotheses.
pub fn exact_lrt(g: &WeightedGraph, pair: &DistributionPair, k: usize) -> Result<TestVerdict> {
    exact_lrt_with_budget(g, pair, k, ENUMERATION_BUDGET)
}

pub fn exact_lrt_with_budget(g: &WeightedGraph, pair: &DistributionPair, k: usize, budget: f64) -> Result<TestVerdict> {
    let n = g.n();
    check_k(n, k)?;
    check_budget(n, k, budget)?;
    let table = RatioTable::new(g, pair)?;

    if table.pos_total > 0 {
        let mut cover: Option<Vec<usize>> = None;
        table.walk(k, |s, _, pos| {
            if cover.is_none() && pos == table.pos_total {
                cover = Some(s.to_vec());
            }
        });
        let vertices = cover.ok_or(Error::ImpossibleObservation)?;
        let witness = Witness { vertices, interval: None };
        return Ok(TestVerdict::new("lrt", f64::INFINITY, 0.0, Direction::Above, Some(witness)));
    }

    let mut lse = StreamingLse::default();
    table.walk(k, |_, sum, _| lse.push(sum));
    let statistic = lse.value() - choose(n as u64, k as u64).ln();
    Ok(TestVerdict::new("lrt", statistic, 0.0, Direction::Above, None))
}

/// `ln sum exp(x_i)` accumulated one term at a time.
#[derive(Debug, Clone, Copy)]
struct StreamingLse {
    max: f64,
    scaled: f64,
}

impl Default for StreamingLse {
    fn default() -> Self {
        StreamingLse { max: f64::NEG_INFINITY, scaled: 0.0 }
    }
}

impl StreamingLse {
    fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        if self.scaled == 0.0 { f64::NEG_INFINITY } else { self.max + self.scaled.ln() }
    }
}
