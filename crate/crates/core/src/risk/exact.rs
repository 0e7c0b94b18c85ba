use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{for_each_subset, pairs, KahanSum};
use crate::detectors::ENUMERATION_BUDGET;
use crate::distributions::DistributionPair;
use crate::error::{Error, Result};

/// Tolerance of the internal identity `R(T*) = 1 - d_TV(P0, P1)`.
const IDENTITY_TOL: f64 = 1e-12;

/// Outcomes are split into this many fixed ranges so the summation order
/// does not depend on the thread count.
const CHUNKS: u64 = 64;

/// Exact quantities of the likelihood-ratio test on a tiny instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactRisk {
    /// `P0(L > 1) + P1(L <= 1)`.
    pub risk: f64,
    /// `E0|L - 1| / 2`.
    pub half_abs_deviation: f64,
    /// `d_TV(P0, P1)`; equals `half_abs_deviation` unless `P1` puts mass
    /// where `P0` vanishes.
    pub tv: f64,
    /// `E0[sqrt L]`.
    pub root_likelihood: f64,
    /// `E0[L]`, which is 1 when `Q << P`.
    pub mean_likelihood: f64,
    /// `E0[L^2]`.
    pub second_moment: f64,
    pub outcomes: u64,
}

#[derive(Default, Clone, Copy)]
struct Sums {
    risk: KahanSum,
    abs_dev: KahanSum,
    singular: KahanSum,
    root: KahanSum,
    mean: KahanSum,
    square: KahanSum,
}

impl Sums {
    fn merge(mut self, o: &Sums) -> Sums {
        self.risk.add(o.risk.value());
        self.abs_dev.add(o.abs_dev.value());
        self.singular.add(o.singular.value());
        self.root.add(o.root.value());
        self.mean.add(o.mean.value());
        self.square.add(o.square.value());
        self
    }
}

/// Enumerate every assignment of atoms to the `C(n, 2)` edges and compute
/// the risk of the likelihood-ratio test together with `E0|L - 1|`,
/// `E0[sqrt L]`, `E0[L]` and `E0[L^2]`.
///
/// Fails with [`Error::IdentityViolated`] if `R(T*)` and `1 - d_TV` differ
/// by more than 1e-12.
pub fn exact_lrt_risk(n: usize, k: usize, pair: &DistributionPair) -> Result<ExactRisk> {
    exact_lrt_risk_with_budget(n, k, pair, ENUMERATION_BUDGET)
}

pub fn exact_lrt_risk_with_budget(n: usize, k: usize, pair: &DistributionPair, budget: f64) -> Result<ExactRisk> {
    if !pair.p.is_discrete() || !pair.q.is_discrete() {
        return Err(Error::param("pair", "exact enumeration needs two finitely supported laws"));
    }
    if n < 2 || k < 2 || k > n {
        return Err(Error::param("k", format!("need 2 <= k <= n, got n = {n}, k = {k}")));
    }
    let atoms = pair.dominating_atoms();
    let p: Vec<f64> = atoms.iter().map(|&x| pair.p.atom_mass(x)).collect();
    let q: Vec<f64> = atoms.iter().map(|&x| pair.q.atom_mass(x)).collect();
    let m = atoms.len();
    let edges = pairs(n);
    let required = (m as f64).powi(edges as i32);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let total = (m as u64).pow(edges as u32);

    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for_each_subset(n, k, |s| {
        let mut ids = Vec::with_capacity(pairs(k));
        for a in 0..k {
            for b in a + 1..k {
                ids.push(edge_index(n, s[a], s[b]));
            }
        }
        subsets.push(ids);
    });
    let n_subsets = subsets.len() as f64;
    let ratio: Vec<f64> = p.iter().zip(&q).map(|(&pp, &qq)| if pp > 0.0 { qq / pp } else { f64::INFINITY }).collect();

    let chunk = total.div_ceil(CHUNKS);
    let partial: Vec<Sums> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let (lo, hi) = (c * chunk, ((c + 1) * chunk).min(total));
            let mut sums = Sums::default();
            if lo >= hi {
                return sums;
            }
            let mut digits = vec![0usize; edges];
            let mut rest = lo;
            for d in digits.iter_mut() {
                *d = (rest % m as u64) as usize;
                rest /= m as u64;
            }
            for _ in lo..hi {
                visit(&digits, &p, &q, &ratio, &subsets, n_subsets, &mut sums);
                for d in digits.iter_mut() {
                    *d += 1;
                    if *d < m {
                        break;
                    }
                    *d = 0;
                }
            }
            sums
        })
        .collect();
    let sums = partial.iter().fold(Sums::default(), |acc, s| acc.merge(s));

    let half_abs_deviation = 0.5 * sums.abs_dev.value();
    let tv = half_abs_deviation + 0.5 * sums.singular.value();
    let risk = sums.risk.value();
    if (risk - (1.0 - tv)).abs() > IDENTITY_TOL {
        return Err(Error::IdentityViolated(format!("R(T*) = {risk} but 1 - d_TV = {}", 1.0 - tv)));
    }
    Ok(ExactRisk {
        risk,
        half_abs_deviation,
        tv,
        root_likelihood: sums.root.value(),
        mean_likelihood: sums.mean.value(),
        second_moment: sums.square.value(),
        outcomes: total,
    })
}

fn edge_index(n: usize, i: usize, j: usize) -> usize {
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn visit(
    digits: &[usize],
    p: &[f64],
    q: &[f64],
    ratio: &[f64],
    subsets: &[Vec<usize>],
    n_subsets: f64,
    sums: &mut Sums,
) {
    let p0: f64 = digits.iter().map(|&d| p[d]).product();
    if p0 > 0.0 {
        let l = subsets
            .iter()
            .map(|ids| ids.iter().map(|&e| ratio[digits[e]]).product::<f64>())
            .sum::<f64>()
            / n_subsets;
        let p1 = p0 * l;
        sums.risk.add(if l > 1.0 { p0 } else { p1 });
        sums.abs_dev.add(p0 * (l - 1.0).abs());
        sums.root.add(p0 * l.sqrt());
        sums.mean.add(p1);
        sums.square.add(p1 * l);
        return;
    }
    // Null-impossible outcome: L = +inf, the test rejects, and only the
    // planted likelihood matters.
    let p1: f64 = subsets
        .iter()
        .map(|ids| {
            let mut inside = vec![false; digits.len()];
            for &e in ids {
                inside[e] = true;
            }
            digits.iter().zip(&inside).map(|(&d, &s)| if s { q[d] } else { p[d] }).product::<f64>()
        })
        .sum::<f64>()
        / n_subsets;
    sums.singular.add(p1);
}
