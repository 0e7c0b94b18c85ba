//! Risk of a test: Monte Carlo estimates, exact values on tiny instances,
//! and the closed-form thresholds and bounds.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::detectors::{
    exact_lrt_with_budget, interval_scan_test, min_test, scan_test_with_budget, spectral_test_t1, spectral_test_t2,
    support_test, Direction, TestVerdict, ENUMERATION_BUDGET,
};
use crate::distributions::DistributionPair;
use crate::divergences::tv_via_density_set;
use crate::error::{Error, Result};
use crate::model::{sample_null_for, sample_planted, WeightedGraph};
use crate::region::Region;
use crate::rng;

mod bounds;
mod exact;

pub use bounds::{
    bc_bound, bc_risk_lower_bound, omega, second_moment, thresholds, thresholds_with, SecondMoment, ThresholdOptions,
    ThresholdReport,
};
pub use exact::{exact_lrt_risk, exact_lrt_risk_with_budget, ExactRisk};

/// Stream index reserved for a detector's own randomness within a trial.
const DETECTOR_STREAM: u64 = 0xC01F;

/// A detector with every parameter resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "test", rename_all = "snake_case")]
pub enum DetectorConfig {
    Support { set: Region },
    Scan { k: usize, budget: f64 },
    T1 { set: Region, p_of_a: f64, delta: f64 },
    T2 { mu_p: f64, support: (f64, f64), delta: f64 },
    Interval { k: usize },
    Min,
    Lrt { k: usize, budget: f64 },
    AlwaysAccept,
    /// Rejects with probability 1/2, independently of the data.
    CoinFlip,
}

impl DetectorConfig {
    /// Resolve the detector `name` for the pair. `set` overrides the region
    /// the support and T1 tests would otherwise derive from the pair: the
    /// `P`-null part of `Q`'s support for the support test, `{p > q}` for T1.
    pub fn for_pair(name: &str, pair: &DistributionPair, k: usize, delta: f64, set: Option<Region>) -> Result<Self> {
        Ok(match name {
            "support" => {
                let set = set.unwrap_or_else(|| pair.null_region());
                if set.is_empty() {
                    return Err(Error::param("set", "Q has no mass where P vanishes; pass an explicit region"));
                }
                DetectorConfig::Support { set }
            }
            "scan" => DetectorConfig::Scan { k, budget: ENUMERATION_BUDGET },
            "t1" => match set {
                Some(set) => DetectorConfig::T1 { p_of_a: pair.p.prob(&set), set, delta },
                None => {
                    let a = tv_via_density_set(pair)?;
                    DetectorConfig::T1 { set: a.region, p_of_a: a.p_mass, delta }
                }
            },
            "t2" => {
                let support = pair.support_hull();
                if !(support.0.is_finite() && support.1.is_finite()) {
                    return Err(Error::param("pair", "T2 needs bounded supports"));
                }
                DetectorConfig::T2 { mu_p: pair.p.mean(), support, delta }
            }
            "interval" => DetectorConfig::Interval { k },
            "min" => DetectorConfig::Min,
            "lrt" => DetectorConfig::Lrt { k, budget: ENUMERATION_BUDGET },
            "always_accept" => DetectorConfig::AlwaysAccept,
            "coin_flip" => DetectorConfig::CoinFlip,
            other => return Err(Error::param("test", format!("unknown detector `{other}`"))),
        })
    }

    /// Replace the enumeration budget of the exhaustive detectors.
    pub fn with_budget(mut self, b: f64) -> Self {
        if let DetectorConfig::Scan { budget, .. } | DetectorConfig::Lrt { budget, .. } = &mut self {
            *budget = b;
        }
        self
    }

    pub fn name(&self) -> &'static str {
        match self {
            DetectorConfig::Support { .. } => "support",
            DetectorConfig::Scan { .. } => "scan",
            DetectorConfig::T1 { .. } => "t1",
            DetectorConfig::T2 { .. } => "t2",
            DetectorConfig::Interval { .. } => "interval",
            DetectorConfig::Min => "min",
            DetectorConfig::Lrt { .. } => "lrt",
            DetectorConfig::AlwaysAccept => "always_accept",
            DetectorConfig::CoinFlip => "coin_flip",
        }
    }

    /// Whether [`DetectorConfig::run`] reads the pair.
    pub fn needs_pair(&self) -> bool {
        matches!(self, DetectorConfig::Scan { .. } | DetectorConfig::Lrt { .. })
    }

    /// Apply the detector. Only the scan and likelihood-ratio tests read
    /// `pair`; `seed` feeds only detectors with internal randomness.
    pub fn run(&self, g: &WeightedGraph, pair: Option<&DistributionPair>, seed: u64) -> Result<TestVerdict> {
        let pair = || pair.ok_or_else(|| Error::param("pair", format!("the {} test needs the pair", self.name())));
        match self {
            DetectorConfig::Support { set } => support_test(g, set),
            DetectorConfig::Scan { k, budget } => scan_test_with_budget(g, pair()?, *k, *budget),
            DetectorConfig::T1 { set, p_of_a, delta } => spectral_test_t1(g, set, *p_of_a, *delta),
            DetectorConfig::T2 { mu_p, support, delta } => spectral_test_t2(g, *mu_p, *support, *delta),
            DetectorConfig::Interval { k } => interval_scan_test(g, *k),
            DetectorConfig::Min => min_test(g),
            DetectorConfig::Lrt { k, budget } => exact_lrt_with_budget(g, pair()?, *k, *budget),
            DetectorConfig::AlwaysAccept => Ok(TestVerdict::new("always_accept", 0.0, 0.0, Direction::Above, None)),
            DetectorConfig::CoinFlip => {
                let u: f64 = rng::sub_stream(seed, DETECTOR_STREAM).random();
                Ok(TestVerdict::new("coin_flip", u, 0.5, Direction::Below, None))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskEstimate {
    pub detector: &'static str,
    pub n: usize,
    pub k: usize,
    /// Fraction of null instances rejected.
    pub type1: f64,
    /// Fraction of planted instances accepted.
    pub type2: f64,
    pub risk: f64,
    pub trials_per_hypothesis: usize,
    pub null_rejections: usize,
    pub planted_acceptances: usize,
    /// Trials whose detector returned an error; they are left out of the rates.
    pub null_failures: usize,
    pub planted_failures: usize,
    pub se_type1: f64,
    pub se_type2: f64,
    pub ci95_halfwidth: f64,
    pub base_seed: u64,
}

impl RiskEstimate {
    /// Standard error of `risk`.
    pub fn se_risk(&self) -> f64 {
        self.se_type1.hypot(self.se_type2)
    }
}

/// Seed of the null instance of trial `t`; the planted one uses `2t + 1`.
pub fn trial_seed(base_seed: u64, t: usize, planted: bool) -> u64 {
    rng::derive_seed(base_seed, 2 * t as u64 + planted as u64)
}

/// Run `trials` null and `trials` planted instances through `detector`.
///
/// Every instance has its own derived seed, so the result does not depend
/// on the number of worker threads.
pub fn estimate_risk(
    detector: &DetectorConfig,
    n: usize,
    k: usize,
    pair: &DistributionPair,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let run = |planted: bool| -> (usize, usize, Option<Error>) {
        let outcomes: Vec<Result<bool>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let s = trial_seed(seed, t, planted);
                let inst = if planted { sample_planted(n, k, pair, s)? } else { sample_null_for(n, k, &pair.p, s)? };
                Ok(detector.run(&inst.graph, Some(pair), s)?.rejects())
            })
            .collect();
        let mut rejections = 0;
        let mut failures = 0;
        let mut first_error = None;
        for o in outcomes {
            match o {
                Ok(r) => rejections += r as usize,
                Err(e) => {
                    failures += 1;
                    first_error.get_or_insert(e);
                }
            }
        }
        (rejections, failures, first_error)
    };
    let (null_rejections, null_failures, e0) = run(false);
    let (planted_rejections, planted_failures, e1) = run(true);
    for (failures, e) in [(null_failures, e0), (planted_failures, e1)] {
        if let (true, Some(e)) = (failures == trials, e) {
            return Err(e);
        }
    }

    let done0 = trials - null_failures;
    let done1 = trials - planted_failures;
    let planted_acceptances = done1 - planted_rejections;
    let type1 = null_rejections as f64 / done0 as f64;
    let type2 = planted_acceptances as f64 / done1 as f64;
    let (se_type1, h1) = rate_error(type1, done0);
    let (se_type2, h2) = rate_error(type2, done1);
    Ok(RiskEstimate {
        detector: detector.name(),
        n,
        k,
        type1,
        type2,
        risk: type1 + type2,
        trials_per_hypothesis: trials,
        null_rejections,
        planted_acceptances,
        null_failures,
        planted_failures,
        se_type1,
        se_type2,
        ci95_halfwidth: h1.hypot(h2),
        base_seed: seed,
    })
}

const Z95: f64 = 1.959_963_984_540_054;

/// Standard error of a binomial rate and its 95% half-width. The Wilson
/// interval replaces the normal one when fewer than 10 trials fall on
/// either side.
fn rate_error(rate: f64, trials: usize) -> (f64, f64) {
    let t = trials as f64;
    let se = (rate * (1.0 - rate) / t).sqrt();
    if rate.min(1.0 - rate) * t >= 10.0 {
        return (se, Z95 * se);
    }
    let z2 = Z95 * Z95;
    let centre = (rate + z2 / (2.0 * t)) / (1.0 + z2 / t);
    let half = Z95 / (1.0 + z2 / t) * (rate * (1.0 - rate) / t + z2 / (4.0 * t * t)).sqrt();
    (se, (centre + half - rate).max(rate - (centre - half)))
}
