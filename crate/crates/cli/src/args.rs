use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hidden_clique::PairSpec;

#[derive(Debug, Parser)]
#[command(name = "hclique", version, about = "Weighted hidden clique detection experiments")]
pub struct Cli {
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true, env = "HCLIQUE_THREADS")]
    pub threads: Option<usize>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a null or planted instance and write it in the text format.
    Generate(GenerateArgs),
    /// Run one detector on an instance file.
    Detect(DetectArgs),
    /// Divergences between P and Q, and the set {p > q}.
    Divergence(PairArgs),
    /// Closed-form detection thresholds.
    Thresholds(ThresholdArgs),
    /// Monte Carlo risk of one detector.
    Risk(RiskArgs),
    /// Monte Carlo risk over a grid of (n, k, test), as CSV.
    Sweep(SweepArgs),
    /// Run the built-in consistency checks.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// `name:param1,param2`, e.g. `bernoulli_dirac:0.5`.
    #[arg(long)]
    pub pair: PairSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HypothesisArg {
    H0,
    H1,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Planted-set size (required for H1).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub pair: PairSpec,
    #[arg(long, value_enum, default_value = "h1")]
    pub hypothesis: HypothesisArg,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TestArg {
    Support,
    Scan,
    T1,
    T2,
    Interval,
    Min,
    Lrt,
    AlwaysAccept,
    CoinFlip,
}

impl TestArg {
    pub fn name(self) -> &'static str {
        match self {
            TestArg::Support => "support",
            TestArg::Scan => "scan",
            TestArg::T1 => "t1",
            TestArg::T2 => "t2",
            TestArg::Interval => "interval",
            TestArg::Min => "min",
            TestArg::Lrt => "lrt",
            TestArg::AlwaysAccept => "always_accept",
            TestArg::CoinFlip => "coin_flip",
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectorArgs {
    /// Confidence parameter of the spectral tests.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Region for the support and T1 tests, e.g. `{0}` or `(1,2];[3,inf)`.
    #[arg(long)]
    pub region: Option<String>,
    /// Largest number of k-subsets the scan and LRT tests may enumerate.
    #[arg(long, default_value_t = hidden_clique::detectors::ENUMERATION_BUDGET)]
    pub budget: f64,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long, value_enum)]
    pub test: TestArg,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Planted-set size; defaults to the one in the instance header.
    #[arg(long)]
    pub k: Option<usize>,
    /// Needed by every test except support (with --region), interval and min.
    #[arg(long)]
    pub pair: Option<PairSpec>,
    #[command(flatten)]
    pub detector: DetectorArgs,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub pair: PairSpec,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Constant of the `c ln n` fallback when the KL divergence is infinite.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Planted-set size for the Bhattacharyya risk bound.
    #[arg(long)]
    pub bc_k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    #[arg(long, value_enum)]
    pub test: TestArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub pair: PairSpec,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub detector: DetectorArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated detectors.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub test: Vec<TestArg>,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// `start:end[:step]`, end inclusive.
    #[arg(long)]
    pub k_range: KRange,
    #[arg(long)]
    pub pair: PairSpec,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub detector: DetectorArgs,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl KRange {
    pub fn values(&self) -> impl Iterator<Item = usize> {
        (self.start..=self.end).step_by(self.step)
    }
}

impl std::str::FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad number `{t}` in k-range `{s}`"));
        let (start, end, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("k-range `{s}` must be start:end[:step]")),
        };
        if step == 0 || start > end {
            return Err(format!("k-range `{s}` is empty"));
        }
        Ok(KRange { start, end, step })
    }
}

impl std::fmt::Display for KRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}
