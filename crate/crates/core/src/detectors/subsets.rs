//! Depth-first enumeration of `k`-subsets with running log-ratio sums.
//!
//! Infinite per-edge log-ratios are tracked as counts instead of being
//! added: a subset holding any `-inf` edge has zero planted likelihood and
//! is skipped together with every extension of it.

use crate::combinatorics::choose;
use crate::distributions::DistributionPair;
use crate::error::{Error, Result};
use crate::model::WeightedGraph;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Finite,
    PosInf,
    NegInf,
}

pub(crate) struct RatioTable {
    n: usize,
    finite: Vec<f64>,
    class: Vec<Class>,
    pub(crate) pos_total: usize,
}

impl RatioTable {
    pub(crate) fn new(g: &WeightedGraph, pair: &DistributionPair) -> Result<Self> {
        let n = g.n();
        let mut finite = vec![0.0; n * n];
        let mut class = vec![Class::Finite; n * n];
        let mut pos_total = 0;
        for (i, j, w) in g.edges() {
            let lr = pair.log_ratio(w)?;
            let (f, c) = if lr == f64::INFINITY {
                pos_total += 1;
                (0.0, Class::PosInf)
            } else if lr == f64::NEG_INFINITY {
                (0.0, Class::NegInf)
            } else {
                (lr, Class::Finite)
            };
            for (a, b) in [(i, j), (j, i)] {
                finite[a * n + b] = f;
                class[a * n + b] = c;
            }
        }
        Ok(RatioTable { n, finite, class, pos_total })
    }

    /// Visit every `k`-subset free of `-inf` edges in lexicographic order,
    /// passing the subset, the sum of its finite log-ratios and its number
    /// of `+inf` edges.
    pub(crate) fn walk(&self, k: usize, mut visit: impl FnMut(&[usize], f64, usize)) {
        let mut chosen = Vec::with_capacity(k);
        self.descend(k, 0, &mut chosen, 0.0, 0, &mut visit);
    }

    fn descend(
        &self,
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        sum: f64,
        pos: usize,
        visit: &mut impl FnMut(&[usize], f64, usize),
    ) {
        if chosen.len() == k {
            visit(chosen, sum, pos);
            return;
        }
        let remaining = k - chosen.len();
        for v in start..=self.n - remaining {
            let row = v * self.n;
            let mut add = 0.0;
            let mut add_pos = 0;
            let mut dead = false;
            for &u in chosen.iter() {
                match self.class[row + u] {
                    Class::Finite => add += self.finite[row + u],
                    Class::PosInf => add_pos += 1,
                    Class::NegInf => {
                        dead = true;
                        break;
                    }
                }
            }
            if dead {
                continue;
            }
            chosen.push(v);
            self.descend(k, v + 1, chosen, sum + add, pos + add_pos, visit);
            chosen.pop();
        }
    }
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::param("k", format!("{k} outside [2, {n}]")));
    }
    Ok(())
}

pub(crate) fn check_budget(n: usize, k: usize, budget: f64) -> Result<()> {
    let required = choose(n as u64, k as u64);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}
