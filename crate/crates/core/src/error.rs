use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown distribution pair `{0}`")]
    UnknownPair(String),

    #[error("density ratio undefined at x = {0}: both densities vanish")]
    UndefinedRatio(f64),

    #[error("adaptive quadrature did not converge on [{lo}, {hi}]")]
    QuadratureFailed { lo: f64, hi: f64 },

    #[error("density difference changes sign more than {budget} times")]
    TooManySignChanges { budget: usize },

    #[error("enumeration of {required:.3e} cases exceeds the budget of {budget:.3e}")]
    BudgetExceeded { required: f64, budget: f64 },

    #[error("edge weight {weight} lies outside the declared support [{lo}, {hi}]")]
    WeightOutOfSupport { weight: f64, lo: f64, hi: f64 },

    #[error("observation has zero likelihood under both hypotheses")]
    ImpossibleObservation,

    #[error("eigenvalue iteration stopped after {iterations} steps without converging (best estimate {best})")]
    NotConverged { best: f64, iterations: usize },

    #[error("identity check failed: {0}")]
    IdentityViolated(String),

    #[error("malformed instance file: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::UnknownPair(_) => "unknown_pair",
            Error::UndefinedRatio(_) => "undefined_ratio",
            Error::QuadratureFailed { .. } => "quadrature_failed",
            Error::TooManySignChanges { .. } => "too_many_sign_changes",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::WeightOutOfSupport { .. } => "weight_out_of_support",
            Error::ImpossibleObservation => "impossible_observation",
            Error::NotConverged { .. } => "not_converged",
            Error::IdentityViolated(_) => "identity_violated",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
