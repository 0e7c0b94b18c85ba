//! Detection tests. Each takes a weighted graph and returns a
//! [`TestVerdict`]; ties at the threshold always accept `H0`.

use serde::Serialize;

use crate::region::Interval;

mod interval;
mod lrt;
mod min;
mod scan;
mod spectral;
mod subsets;
mod support;

pub use interval::interval_scan_test;
pub use lrt::{exact_lrt, exact_lrt_with_budget};
pub use min::{min_test, MIN_TEST_MAX_N};
pub use scan::{scan_test, scan_test_with_budget};
pub use spectral::{spectral_test_t1, spectral_test_t2, spectral_test_t2_with, spectral_threshold, SPECTRAL_REL_TOL};
pub use support::support_test;

/// Largest number of `k`-subsets the exhaustive tests will enumerate.
pub const ENUMERATION_BUDGET: f64 = 1e8;

pub const DETECTOR_NAMES: &[&str] = &["support", "scan", "t1", "t2", "interval", "min", "lrt"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    AcceptH0,
    RejectH0,
}

impl Decision {
    pub fn rejects(self) -> bool {
        self == Decision::RejectH0
    }
}

/// Which side of the threshold rejects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Reject iff `statistic > threshold`.
    Above,
    /// Reject iff `statistic < threshold`.
    Below,
}

impl Direction {
    pub fn decide(self, statistic: f64, threshold: f64) -> Decision {
        let reject = match self {
            Direction::Above => statistic > threshold,
            Direction::Below => statistic < threshold,
        };
        if reject { Decision::RejectH0 } else { Decision::AcceptH0 }
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub vertices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestVerdict {
    pub decision: Decision,
    #[serde(with = "crate::serde_ext")]
    pub statistic: f64,
    #[serde(with = "crate::serde_ext")]
    pub threshold: f64,
    pub direction: Direction,
    pub detector: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl TestVerdict {
    pub(crate) fn new(
        detector: &'static str,
        statistic: f64,
        threshold: f64,
        direction: Direction,
        witness: Option<Witness>,
    ) -> Self {
        TestVerdict { decision: direction.decide(statistic, threshold), statistic, threshold, direction, detector, witness }
    }

    pub fn rejects(&self) -> bool {
        self.decision.rejects()
    }
}
