//! Built-in consistency checks: divergence inequalities on random discrete
//! pairs and the enumeration identities of the likelihood ratio.

use rand::Rng;
use serde::Serialize;

use crate::combinatorics::pairs;
use crate::detectors::{exact_lrt, spectral_test_t1, spectral_test_t2};
use crate::distributions::{named_pair, Distribution, DistributionPair};
use crate::divergences::divergences;
use crate::error::Result;
use crate::model::{sample_planted, WeightedGraph};
use crate::region::Region;
use crate::risk::{exact_lrt_risk, second_moment};
use crate::rng;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfCheckReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// A random pair on at most `max_support` points with `Q << P`: `P` charges
/// every point, `Q` a random non-empty subset of them.
pub fn random_discrete_pair<R: Rng + ?Sized>(rng: &mut R, max_support: usize) -> Result<DistributionPair> {
    let size = rng.random_range(1..=max_support);
    let locations: Vec<f64> = (0..size).map(|i| i as f64 + rng.random_range(0.0..0.5)).collect();
    let weights = |rng: &mut R, keep: &dyn Fn(usize) -> bool| -> Vec<(f64, f64)> {
        let raw: Vec<(f64, f64)> = locations
            .iter()
            .enumerate()
            .filter(|&(i, _)| keep(i))
            .map(|(_, &x)| (x, rng.random_range(0.01..1.0)))
            .collect();
        let total: f64 = raw.iter().map(|w| w.1).sum();
        raw.into_iter().map(|(x, w)| (x, w / total)).collect()
    };
    let p = weights(rng, &|_| true);
    let mask: u32 = rng.random_range(1..(1u32 << size));
    let q = weights(rng, &|i| mask >> i & 1 == 1);
    Ok(DistributionPair::new(Distribution::discrete(&p)?, Distribution::discrete(&q)?))
}

fn divergence_relations(seed: u64, cases: usize) -> Result<Check> {
    let mut rng = rng::stream(seed);
    let mut worst = String::new();
    let mut passed = true;
    for c in 0..cases {
        let pair = random_discrete_pair(&mut rng, 8)?;
        let d = divergences(&pair)?;
        let ok = d.kl <= (1.0 + d.chi2).ln() + TOL
            && (1.0 + d.chi2).ln() <= d.chi2 + TOL
            && d.hellinger_sq <= d.tv + TOL
            && d.tv <= 2f64.sqrt() * d.hellinger_sq.sqrt() + TOL
            && (d.hellinger_sq - (1.0 - d.bhattacharyya)).abs() <= TOL;
        if !ok && passed {
            passed = false;
            worst = format!("case {c}: {d:?}");
        }
    }
    Ok(Check { name: "divergence_relations", passed, cases, detail: worst })
}

fn likelihood_identities() -> Result<Check> {
    let pair = named_pair("bernoulli_dirac", &[0.5])?;
    let mut cases = 0;
    let mut failures = Vec::new();
    for n in 4..=5 {
        for k in 2..=3 {
            cases += 1;
            let r = exact_lrt_risk(n, k, &pair)?;
            let sm = second_moment(n, k, 2.0)?;
            let lower = 1.0 - (1.0 - r.root_likelihood.powi(2)).max(0.0).sqrt();
            if (r.mean_likelihood - 1.0).abs() > 1e-12 {
                failures.push(format!("n={n} k={k}: E0[L] = {}", r.mean_likelihood));
            }
            if (r.second_moment - sm.value).abs() > 1e-10 {
                failures.push(format!("n={n} k={k}: E0[L^2] {} vs closed form {}", r.second_moment, sm.value));
            }
            if !(lower <= r.risk + 1e-12 && r.risk <= r.root_likelihood + 1e-12) {
                failures.push(format!("n={n} k={k}: sandwich {lower} <= {} <= {}", r.risk, r.root_likelihood));
            }
        }
    }
    Ok(Check { name: "likelihood_identities", passed: failures.is_empty(), cases, detail: failures.join("; ") })
}

/// `E0[L] = 1` by summing the test's own statistic over every outcome.
fn lrt_mean(seed: u64) -> Result<Check> {
    let mut rng = rng::stream(seed);
    let (n, k) = (4, 2);
    let m = pairs(n);
    let mut failures = Vec::new();
    let cases = 5;
    for _ in 0..cases {
        let (a, b) = (rng.random_range(0.05..0.95), rng.random_range(0.05..0.95));
        let pair = named_pair("bernoulli_bernoulli", &[a, b])?;
        let mut mean = 0.0;
        for x in 0u32..(1 << m) {
            let g = WeightedGraph::from_upper(n, (0..m).map(|e| (x >> e & 1) as f64).collect())?;
            let p0: f64 = g.weights().iter().map(|&w| pair.p.atom_mass(w)).product();
            mean += p0 * exact_lrt(&g, &pair, k)?.statistic.exp();
        }
        if (mean - 1.0).abs() > 1e-12 {
            failures.push(format!("Bern({a:.3}) vs Bern({b:.3}): {mean}"));
        }
    }
    Ok(Check { name: "lrt_mean_is_one", passed: failures.is_empty(), cases, detail: failures.join("; ") })
}

fn t1_matches_t2(seed: u64) -> Result<Check> {
    let pair = named_pair("bernoulli_dirac", &[0.5])?;
    let set = Region::new(vec![0.0], Vec::new());
    let cases = 5;
    let mut passed = true;
    for t in 0..cases {
        let inst = sample_planted(80, 12, &pair, rng::derive_seed(seed, t as u64))?;
        let t1 = spectral_test_t1(&inst.graph, &set, 0.5, 0.1)?;
        let z = inst.graph.map(|w| if set.contains(w) { 1.0 } else { 0.0 });
        let t2 = spectral_test_t2(&z, 0.5, (0.0, 1.0), 0.1)?;
        passed &= t1.statistic.to_bits() == t2.statistic.to_bits() && t1.threshold.to_bits() == t2.threshold.to_bits();
    }
    Ok(Check { name: "t1_equals_t2_on_indicators", passed, cases, detail: String::new() })
}

/// Run every check. Library errors inside a check are reported as failures.
pub fn run_selfcheck(seed: u64) -> SelfCheckReport {
    let results: Vec<(&'static str, Result<Check>)> = vec![
        ("divergence_relations", divergence_relations(seed, 100)),
        ("likelihood_identities", likelihood_identities()),
        ("lrt_mean_is_one", lrt_mean(seed)),
        ("t1_equals_t2_on_indicators", t1_matches_t2(seed)),
    ];
    let checks: Vec<Check> = results
        .into_iter()
        .map(|(name, r)| r.unwrap_or_else(|e| Check { name, passed: false, cases: 0, detail: e.to_string() }))
        .collect();
    SelfCheckReport { passed: checks.iter().all(|c| c.passed), checks }
}
