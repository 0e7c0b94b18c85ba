use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use hidden_clique::divergences::{divergences, tv_via_density_set, DensitySet, DivergenceReport};
use hidden_clique::model::{sample_null_for, sample_planted, Hypothesis, PlantedInstance};
use hidden_clique::risk::{estimate_risk, thresholds_with, DetectorConfig, RiskEstimate, ThresholdOptions};
use hidden_clique::selfcheck::run_selfcheck;
use hidden_clique::{DistributionPair, PairSpec, Region};
use serde::Serialize;

use crate::args::{
    Cli, Command, DetectArgs, DetectorArgs, GenerateArgs, HypothesisArg, PairArgs, RiskArgs, SelfcheckArgs, SweepArgs,
    TestArg, ThresholdArgs,
};
use crate::output::{json, write, CliError, SCHEMA};

/// Everything a run was configured with, echoed into its output. Worker
/// count is left out so that outputs do not depend on it.
#[derive(Debug, Default, Serialize)]
struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pair: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_range: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hypothesis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    test: Option<Vec<&'static str>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bc_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    region: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
}

impl ExperimentConfig {
    fn new(cli: &Cli) -> Self {
        ExperimentConfig { output: cli.out.as_ref().map(|p| p.display().to_string()), ..Default::default() }
    }

    fn detector(&mut self, d: &DetectorArgs) {
        self.delta = Some(d.delta);
        self.region = d.region.clone();
        self.budget = Some(d.budget);
    }
}

pub fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let out = cli.out.as_deref();
    let mut cfg = ExperimentConfig::new(cli);
    match &cli.command {
        Command::Generate(a) => generate(a, cfg, out),
        Command::Detect(a) => detect(a, cfg, out),
        Command::Divergence(a) => divergence(a, cfg, out),
        Command::Thresholds(a) => threshold_report(a, cfg, out),
        Command::Risk(a) => risk(a, cfg, out),
        Command::Sweep(a) => sweep(a, cfg, out),
        Command::Selfcheck(SelfcheckArgs { seed }) => {
            let seed = resolve_seed(*seed);
            cfg.seed = Some(seed);
            let report = run_selfcheck(seed);
            write(out, &json("selfcheck", &cfg, &report))?;
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn parse_region(text: &Option<String>) -> Result<Option<Region>, CliError> {
    Ok(text.as_deref().map(Region::parse).transpose()?)
}

/// Resolve a detector; `pair` may be absent for tests that do not use it.
fn resolve_detector(
    test: TestArg,
    pair: Option<&DistributionPair>,
    k: usize,
    d: &DetectorArgs,
) -> Result<DetectorConfig, CliError> {
    let region = parse_region(&d.region)?;
    let cfg = match (test, pair, region) {
        (TestArg::Interval, _, _) => DetectorConfig::Interval { k },
        (TestArg::Min, _, _) => DetectorConfig::Min,
        (TestArg::AlwaysAccept, _, _) => DetectorConfig::AlwaysAccept,
        (TestArg::CoinFlip, _, _) => DetectorConfig::CoinFlip,
        (TestArg::Support, None, Some(set)) => DetectorConfig::Support { set },
        (_, Some(pair), region) => DetectorConfig::for_pair(test.name(), pair, k, d.delta, region)?,
        (_, None, _) => return Err(CliError::Usage(format!("the {} test needs --pair", test.name()))),
    };
    Ok(cfg.with_budget(d.budget))
}

fn generate(a: &GenerateArgs, mut cfg: ExperimentConfig, out: Option<&Path>) -> Result<ExitCode, CliError> {
    let pair = a.pair.build()?;
    let seed = resolve_seed(a.seed);
    let inst = match a.hypothesis {
        HypothesisArg::H0 => sample_null_for(a.n, a.k.unwrap_or(0), &pair.p, seed)?,
        HypothesisArg::H1 => {
            let k = a.k.ok_or_else(|| CliError::Usage("--k is required for a planted instance".into()))?;
            sample_planted(a.n, k, &pair, seed)?
        }
    };
    let text = inst.to_text();
    let Some(path) = out else {
        write(None, &text)?;
        return Ok(ExitCode::SUCCESS);
    };
    write(Some(path), &text)?;

    #[derive(Serialize)]
    struct Written<'a> {
        edges: usize,
        hypothesis: Hypothesis,
        hidden_set: Option<&'a [usize]>,
    }
    cfg.pair = Some(a.pair.to_string());
    cfg.n = Some(vec![a.n]);
    cfg.k = Some(inst.k);
    cfg.hypothesis = Some(inst.hypothesis.to_string());
    cfg.seed = Some(seed);
    let summary = Written { edges: inst.graph.edge_count(), hypothesis: inst.hypothesis, hidden_set: inst.hidden_set.as_deref() };
    write(None, &json("generate", &cfg, &summary))?;
    Ok(ExitCode::SUCCESS)
}

fn read_instance(path: &Path) -> Result<PlantedInstance, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(PlantedInstance::from_text(&text)?)
}

fn detect(a: &DetectArgs, mut cfg: ExperimentConfig, out: Option<&Path>) -> Result<ExitCode, CliError> {
    let inst = read_instance(&a.input)?;
    let pair = a.pair.as_ref().map(PairSpec::build).transpose()?;
    let k = a.k.unwrap_or(inst.k);
    let detector = resolve_detector(a.test, pair.as_ref(), k, &a.detector)?;
    let verdict = detector.run(&inst.graph, pair.as_ref(), inst.seed)?;

    cfg.pair = a.pair.as_ref().map(|p| p.to_string());
    cfg.n = Some(vec![inst.graph.n()]);
    cfg.k = Some(k);
    cfg.test = Some(vec![a.test.name()]);
    cfg.seed = Some(inst.seed);
    cfg.input = Some(a.input.display().to_string());
    cfg.detector(&a.detector);
    write(out, &json("detect", &cfg, &verdict))?;
    Ok(ExitCode::SUCCESS)
}

fn divergence(a: &PairArgs, mut cfg: ExperimentConfig, out: Option<&Path>) -> Result<ExitCode, CliError> {
    #[derive(Serialize)]
    struct Report {
        #[serde(flatten)]
        divergences: DivergenceReport,
        density_set: DensitySet,
    }
    let pair = a.pair.build()?;
    let report = Report { divergences: divergences(&pair)?, density_set: tv_via_density_set(&pair)? };
    cfg.pair = Some(a.pair.to_string());
    write(out, &json("divergence", &cfg, &report))?;
    Ok(ExitCode::SUCCESS)
}

fn threshold_report(a: &ThresholdArgs, mut cfg: ExperimentConfig, out: Option<&Path>) -> Result<ExitCode, CliError> {
    let pair = a.pair.build()?;
    let report = thresholds_with(a.n, &pair, a.epsilon, a.delta, ThresholdOptions { c: a.c, bc_k: a.bc_k })?;
    cfg.pair = Some(a.pair.to_string());
    cfg.n = Some(vec![a.n]);
    cfg.epsilon = Some(a.epsilon);
    cfg.delta = Some(a.delta);
    cfg.c = Some(a.c);
    cfg.bc_k = a.bc_k;
    write(out, &json("thresholds", &cfg, &report))?;
    Ok(ExitCode::SUCCESS)
}

fn risk(a: &RiskArgs, mut cfg: ExperimentConfig, out: Option<&Path>) -> Result<ExitCode, CliError> {
    #[derive(Serialize)]
    struct Report<'a> {
        detector: &'a DetectorConfig,
        estimate: RiskEstimate,
    }
    let pair = a.pair.build()?;
    let seed = resolve_seed(a.seed);
    let detector = resolve_detector(a.test, Some(&pair), a.k, &a.detector)?;
    let estimate = estimate_risk(&detector, a.n, a.k, &pair, a.trials, seed)?;

    cfg.pair = Some(a.pair.to_string());
    cfg.n = Some(vec![a.n]);
    cfg.k = Some(a.k);
    cfg.test = Some(vec![a.test.name()]);
    cfg.trials = Some(a.trials);
    cfg.seed = Some(seed);
    cfg.detector(&a.detector);
    write(out, &json("risk", &cfg, &Report { detector: &detector, estimate }))?;
    Ok(ExitCode::SUCCESS)
}

/// CSV with one row per `(n, k, test)`. Combinations that fail get `NaN`
/// rates and a trailing `# error` comment line.
fn sweep(a: &SweepArgs, mut cfg: ExperimentConfig, out: Option<&Path>) -> Result<ExitCode, CliError> {
    let pair = a.pair.build()?;
    let seed = resolve_seed(a.seed);
    cfg.pair = Some(a.pair.to_string());
    cfg.n = Some(a.n.clone());
    cfg.k_range = Some(a.k_range.to_string());
    cfg.test = Some(a.test.iter().map(|t| t.name()).collect());
    cfg.trials = Some(a.trials);
    cfg.seed = Some(seed);
    cfg.detector(&a.detector);

    let config_line = serde_json::to_string(&cfg).expect("config serializes");
    let mut csv = format!("# schema={SCHEMA} command=sweep config={config_line}\nn,k,test,type1,type2,risk,ci95\n");
    let mut errors = String::new();
    for &n in &a.n {
        for k in a.k_range.values() {
            for &test in &a.test {
                let row = resolve_detector(test, Some(&pair), k, &a.detector)
                    .and_then(|d| Ok(estimate_risk(&d, n, k, &pair, a.trials, seed)?));
                match row {
                    Ok(r) => {
                        let _ = writeln!(csv, "{n},{k},{},{},{},{},{}", test.name(), r.type1, r.type2, r.risk, r.ci95_halfwidth);
                    }
                    Err(e) => {
                        let _ = writeln!(csv, "{n},{k},{},NaN,NaN,NaN,NaN", test.name());
                        let _ = writeln!(errors, "# error n={n} k={k} test={}: {e}", test.name());
                    }
                }
            }
        }
    }
    csv.push_str(&errors);
    write(out, &csv)?;
    Ok(ExitCode::SUCCESS)
}
