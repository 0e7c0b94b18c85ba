//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a subset.
//!
//! Every expected value is recomputed here from first principles (closed
//! forms, brute-force enumeration, binomial standard errors) rather than
//! taken from the library under test.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hidden_clique::detectors::{interval_scan_test, min_test};
use hidden_clique::distributions::{dyadic_tail_density, Shape};
use hidden_clique::divergences::divergences;
use hidden_clique::model::{sample_null, sample_null_for, sample_planted};
use hidden_clique::risk::{estimate_risk, exact_lrt_risk, omega, second_moment, thresholds, DetectorConfig};
use hidden_clique::rng::derive_seed;
use hidden_clique::{named_pair, Distribution, DistributionPair, Region};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use statrs::function::erf::erf;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol || (a.is_infinite() && a == b)
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let minutes = |m: u64| Some(Duration::from_secs(60 * m));
    let criteria = [
        Criterion { id: 1, name: "divergence closed forms", budget: Some(Duration::from_secs(1)), run: c1_closed_forms },
        Criterion { id: 2, name: "divergence relations", budget: Some(Duration::from_secs(5)), run: c2_relations },
        Criterion { id: 3, name: "second-moment identity", budget: minutes(2), run: c3_second_moment },
        Criterion { id: 4, name: "exact LRT identities", budget: minutes(5), run: c4_exact_lrt },
        Criterion { id: 5, name: "scan Type I bound", budget: minutes(10), run: c5_scan },
        Criterion { id: 6, name: "spectral T2 regime", budget: minutes(15), run: c6_spectral_t2 },
        Criterion { id: 7, name: "T1 equals T2 on indicators", budget: None, run: c7_t1_consistency },
        Criterion { id: 8, name: "interval scan", budget: minutes(5), run: c8_interval },
        Criterion { id: 9, name: "min test and dyadic density", budget: None, run: c9_min_test },
        Criterion { id: 10, name: "threshold calculator", budget: None, run: c10_thresholds },
        Criterion { id: 11, name: "determinism", budget: None, run: c11_determinism },
    ];
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.1?}, budget {b:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{:>2}] {} ({elapsed:.2?}): {detail}", c.id, c.name);
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

fn bernoulli_dirac() -> DistributionPair {
    named_pair("bernoulli_dirac", &[0.5]).unwrap()
}

fn c1_closed_forms() -> Outcome {
    let d = divergences(&bernoulli_dirac()).map_err(|e| e.to_string())?;
    ensure!(close(d.tv, 0.5, 1e-9), "Bern/Dirac tv {}", d.tv);
    ensure!(close(d.kl, 2f64.ln(), 1e-9), "Bern/Dirac kl {}", d.kl);
    ensure!(close(d.chi2, 1.0, 1e-9), "Bern/Dirac chi2 {}", d.chi2);
    ensure!(close(d.bhattacharyya, 0.5f64.sqrt(), 1e-9), "Bern/Dirac BC {}", d.bhattacharyya);

    let g = divergences(&named_pair("gaussian_shift", &[1.0]).unwrap()).map_err(|e| e.to_string())?;
    // 2 Phi(1/2) - 1 = erf(1/(2 sqrt 2)).
    let tv = erf(0.5 / 2f64.sqrt());
    ensure!(close(g.kl, 0.5, 1e-6), "Gaussian kl {}", g.kl);
    ensure!(close(g.chi2, 1f64.exp() - 1.0, 1e-6), "Gaussian chi2 {}", g.chi2);
    ensure!(close(g.tv, tv, 1e-6), "Gaussian tv {} vs {tv}", g.tv);
    Ok(format!(
        "Gaussian errors kl {:.1e}, chi2 {:.1e}, tv {:.1e}",
        (g.kl - 0.5).abs(),
        (g.chi2 - 1f64.exp() + 1.0).abs(),
        (g.tv - tv).abs()
    ))
}

/// Random discrete pair on integer points; Q may leave P's support.
fn random_pair(rng: &mut StdRng) -> (Vec<f64>, Vec<f64>) {
    let m = rng.random_range(1..=8);
    let draw = |rng: &mut StdRng| -> Vec<f64> {
        loop {
            let w: Vec<f64> =
                (0..m).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.001..1.0) }).collect();
            let s: f64 = w.iter().sum();
            if s > 0.0 {
                return w.into_iter().map(|x| x / s).collect();
            }
        }
    };
    (draw(rng), draw(rng))
}

fn to_distribution(w: &[f64]) -> Distribution {
    let pts: Vec<(f64, f64)> = w.iter().enumerate().filter(|x| *x.1 > 0.0).map(|(i, &x)| (i as f64, x)).collect();
    Distribution::discrete(&pts).unwrap()
}

fn c2_relations() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let tol = 1e-9;
    for case in 0..100 {
        let (p, q) = random_pair(&mut rng);
        let pair = DistributionPair::new(to_distribution(&p), to_distribution(&q));
        let d = divergences(&pair).map_err(|e| e.to_string())?;

        let mut tv = 0.0;
        let mut bc = 0.0;
        let (mut kl, mut chi) = (0.0, -1.0);
        for (&a, &b) in p.iter().zip(&q) {
            tv += 0.5 * (a - b).abs();
            bc += (a * b).sqrt();
            if b > 0.0 {
                kl += if a > 0.0 { b * (b / a).ln() } else { f64::INFINITY };
                chi += if a > 0.0 { b * b / a } else { f64::INFINITY };
            }
        }
        let oracle = [("tv", d.tv, tv), ("kl", d.kl, kl), ("chi2", d.chi2, chi), ("bc", d.bhattacharyya, bc)];
        for (name, got, want) in oracle {
            ensure!(close(got, want, tol), "case {case}: {name} {got} vs oracle {want}");
        }
        let h2 = d.hellinger_sq;
        ensure!(close(h2, 1.0 - d.bhattacharyya, tol), "case {case}: H^2 {h2} vs 1 - BC");
        ensure!(d.kl <= d.chi2.ln_1p() + tol, "case {case}: KL > ln(1 + chi2)");
        ensure!(d.chi2.ln_1p() <= d.chi2 + tol, "case {case}: ln(1 + chi2) > chi2");
        ensure!(h2 <= d.tv + tol, "case {case}: H^2 > TV");
        ensure!(d.tv <= (2.0 * h2).sqrt() + tol, "case {case}: TV > sqrt(2) H");
    }
    Ok("100 pairs agree with the oracle; all inequalities hold".into())
}

/// Brute force over every 0/1 outcome of Bern(1/2) edges with Dirac(1)
/// inside the planted set: `L(x) = 2^C(k,2) #{S : x is 1 on S} / C(n,k)`.
struct Enumeration {
    second_moment: f64,
    half_abs_dev: f64,
    root_likelihood: f64,
    risk: f64,
    mean: f64,
}

fn enumerate(n: usize, k: usize) -> Enumeration {
    let mut index = vec![vec![0usize; n]; n];
    let mut m = 0;
    for i in 0..n {
        for j in i + 1..n {
            index[i][j] = m;
            m += 1;
        }
    }
    let mut masks = Vec::new();
    for s in 0u32..(1 << n) {
        if s.count_ones() as usize != k {
            continue;
        }
        let vs: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 1).collect();
        let mut mask = 0u64;
        for (a, &i) in vs.iter().enumerate() {
            for &j in &vs[a + 1..] {
                mask |= 1 << index[i][j];
            }
        }
        masks.push(mask);
    }
    let scale = 2f64.powi((k * (k - 1) / 2) as i32) / masks.len() as f64;
    let p0 = 0.5f64.powi(m as i32);
    // Group outcomes by how many subsets they complete; L depends only on that.
    let mut by_count = vec![0u64; masks.len() + 1];
    for x in 0u64..(1 << m) {
        by_count[masks.iter().filter(|&&s| x & s == s).count()] += 1;
    }
    let mut e = Enumeration { second_moment: 0.0, half_abs_dev: 0.0, root_likelihood: 0.0, risk: 0.0, mean: 0.0 };
    for (c, &outcomes) in by_count.iter().enumerate() {
        let w = outcomes as f64 * p0;
        let l = c as f64 * scale;
        e.second_moment += w * l * l;
        e.half_abs_dev += 0.5 * w * (l - 1.0).abs();
        e.root_likelihood += w * l.sqrt();
        e.risk += w * l.min(1.0);
        e.mean += w * l;
    }
    e
}

const TINY_GRID: [(usize, usize); 6] = [(5, 2), (5, 3), (6, 2), (6, 3), (7, 2), (7, 3)];

fn c3_second_moment() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, k) in TINY_GRID {
        let oracle = enumerate(n, k);
        let closed = second_moment(n, k, 2.0).map_err(|e| e.to_string())?.value;
        ensure!(close(closed, oracle.second_moment, 1e-10), "n={n} k={k}: {closed} vs {}", oracle.second_moment);
        worst = worst.max((closed - oracle.second_moment).abs());
    }
    Ok(format!("6 grid points, worst gap {worst:.1e}"))
}

fn c4_exact_lrt() -> Outcome {
    let pair = bernoulli_dirac();
    let mut lines = Vec::new();
    for (n, k) in TINY_GRID {
        let o = enumerate(n, k);
        ensure!(close(o.mean, 1.0, 1e-12), "n={n} k={k}: oracle E0[L] = {}", o.mean);
        let x = exact_lrt_risk(n, k, &pair).map_err(|e| e.to_string())?;
        ensure!(close(x.risk, 1.0 - o.half_abs_dev, 1e-12), "n={n} k={k}: R* {} vs 1 - E|L-1|/2 {}", x.risk, 1.0 - o.half_abs_dev);
        ensure!(close(x.risk, o.risk, 1e-12), "n={n} k={k}: R* {} vs oracle {}", x.risk, o.risk);
        ensure!(close(x.root_likelihood, o.root_likelihood, 1e-12), "n={n} k={k}: E0 sqrt L");
        let lower = 1.0 - (1.0 - o.root_likelihood.powi(2)).sqrt();
        ensure!(lower <= x.risk + 1e-12 && x.risk <= o.root_likelihood + 1e-12, "n={n} k={k}: sandwich broken");

        let mut detectors = vec![
            DetectorConfig::for_pair("scan", &pair, k, 0.1, None).unwrap(),
            DetectorConfig::for_pair("t1", &pair, k, 0.1, Some(Region::parse("{0}").unwrap())).unwrap(),
            DetectorConfig::for_pair("t2", &pair, k, 0.1, None).unwrap(),
            DetectorConfig::Min,
            DetectorConfig::Support { set: Region::parse("{1}").unwrap() },
            DetectorConfig::AlwaysAccept,
            DetectorConfig::CoinFlip,
        ];
        if 2 * k <= n {
            detectors.push(DetectorConfig::Interval { k });
        }
        for d in &detectors {
            let r = estimate_risk(d, n, k, &pair, 10_000, derive_seed(4, (n * 10 + k) as u64))
                .map_err(|e| format!("{}: {e}", d.name()))?;
            ensure!(r.null_failures + r.planted_failures == 0, "n={n} k={k} {}: failed trials", d.name());
            ensure!(
                r.risk >= x.risk - 3.0 * r.se_risk(),
                "n={n} k={k}: {} risk {} below R* {} by more than 3 SE ({})",
                d.name(),
                r.risk,
                x.risk,
                r.se_risk()
            );
        }
        lines.push(format!("({n},{k}) R*={:.4}", x.risk));
    }
    Ok(lines.join(", "))
}

fn c5_scan() -> Outcome {
    let pair = bernoulli_dirac();
    let (n, trials) = (24, 2000);
    let mut type2 = Vec::new();
    let mut type1 = f64::NAN;
    for k in [4, 5, 6, 8] {
        let d = DetectorConfig::for_pair("scan", &pair, k, 0.1, None).unwrap();
        let r = estimate_risk(&d, n, k, &pair, trials, 5).map_err(|e| e.to_string())?;
        ensure!(r.null_failures + r.planted_failures == 0, "k={k}: failed trials");
        if k == 6 {
            type1 = r.type1;
        }
        type2.push(r.type2);
    }
    let bound = 1.0 / 720.0;
    let limit = bound + 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt();
    ensure!(type1 <= limit, "Type I {type1} above {limit}");
    ensure!(type2.windows(2).all(|w| w[1] <= w[0]), "Type II not monotone over k = 4,5,6,8: {type2:?}");
    Ok(format!("Type I {type1} <= {limit:.4}; Type II over k=4,5,6,8: {type2:?} (non-increasing)"))
}

fn c6_spectral_t2() -> Outcome {
    let pair = bernoulli_dirac();
    let (n, k, delta) = (4096, 800, 0.1f64);
    let thr = 4.0 * ((n as f64) * 9f64.ln() + (4.0 / delta).ln()).sqrt();
    let guaranteed = thr / 0.5;
    let report = thresholds(n, &pair, 1.0, delta).map_err(|e| e.to_string())?;
    ensure!(close(report.spectral_k_t2, guaranteed, 1e-9), "guaranteed k {} vs {guaranteed}", report.spectral_k_t2);
    ensure!(guaranteed < k as f64, "k = {k} is outside the guaranteed regime ({guaranteed})");

    let d = DetectorConfig::for_pair("t2", &pair, k, delta, None).unwrap();
    let r = estimate_risk(&d, n, k, &pair, 50, 6).map_err(|e| e.to_string())?;
    ensure!(r.null_failures + r.planted_failures == 0, "failed trials");
    ensure!(r.null_rejections == 0, "{} null rejections", r.null_rejections);
    ensure!(r.risk <= 0.1, "risk {}", r.risk);
    Ok(format!("guaranteed k {guaranteed:.1}; risk {} over 50+50 trials, Type I {}", r.risk, r.type1))
}

fn c7_t1_consistency() -> Outcome {
    let s = 0.3;
    let pair = named_pair("uniform_shift", &[s]).unwrap();
    let (n, k, delta) = (60, 12, 0.1);
    let t1 = DetectorConfig::for_pair("t1", &pair, k, delta, None).unwrap();
    let DetectorConfig::T1 { set, p_of_a, .. } = &t1 else { unreachable!() };
    // {p > q} is [0, s) for Unif(0,1) against Unif(s, 1+s).
    ensure!(close(*p_of_a, s, 1e-12), "P(A) {p_of_a} vs {s}");
    let t2 = DetectorConfig::T2 { mu_p: *p_of_a, support: (0.0, 1.0), delta };
    for t in 0..20u64 {
        let inst = if t % 2 == 0 { sample_null(n, &pair.p, t) } else { sample_planted(n, k, &pair, t) };
        let g = inst.map_err(|e| e.to_string())?.graph;
        let a = t1.run(&g, None, t).map_err(|e| e.to_string())?;
        let z = g.map(|w| if w >= 0.0 && w < s { 1.0 } else { 0.0 });
        ensure!(z.weights() == g.map(|w| set.contains(w) as u8 as f64).weights(), "instance {t}: region is not [0, s)");
        let b = t2.run(&z, None, t).map_err(|e| e.to_string())?;
        ensure!(a.statistic.to_bits() == b.statistic.to_bits(), "instance {t}: {} vs {}", a.statistic, b.statistic);
        ensure!(a.threshold.to_bits() == b.threshold.to_bits(), "instance {t}: thresholds differ");
        ensure!(a.decision == b.decision, "instance {t}: decisions differ");
    }
    Ok("20 instances bit-identical".into())
}

fn c8_interval() -> Outcome {
    let pair = named_pair("disjoint_uniform", &[]).unwrap();
    let (n, k, trials) = (100, 10, 200u64);
    for t in 0..trials {
        let null = sample_null_for(n, k, &pair.p, derive_seed(8, 2 * t)).map_err(|e| e.to_string())?;
        let v = interval_scan_test(&null.graph, k).map_err(|e| e.to_string())?;
        ensure!(!v.rejects(), "null trial {t} rejected");
        let planted = sample_planted(n, k, &pair, derive_seed(8, 2 * t + 1)).map_err(|e| e.to_string())?;
        let v = interval_scan_test(&planted.graph, k).map_err(|e| e.to_string())?;
        ensure!(v.rejects(), "planted trial {t} accepted");
        let mut hidden = planted.hidden_set.clone().unwrap();
        hidden.sort_unstable();
        let witness = v.witness.map(|w| w.vertices).unwrap_or_default();
        ensure!(witness == hidden, "planted trial {t}: witness {witness:?} vs {hidden:?}");
    }
    Ok("0 false positives, 0 false negatives, witness = hidden set in 200/200".into())
}

fn c9_min_test() -> Outcome {
    let sequences: [(&str, Vec<u64>); 3] = [
        ("constant 5", vec![5; 64]),
        ("k'_m = m", (1..=64).collect()),
        ("k'_m = 2^(m-1)", (0..64).map(|m| 1u64 << m).collect()),
    ];
    let mut masses = Vec::new();
    for (name, kp) in &sequences {
        let d = dyadic_tail_density(kp, 64).map_err(|e| e.to_string())?;
        let part = d.continuous().ok_or("no continuous part")?;
        let Shape::Piecewise { edges, values } = &part.shape else { return Err("not piecewise".into()) };
        ensure!(values.iter().all(|&v| v >= 0.0), "{name}: negative density");
        let mass: f64 = edges.windows(2).zip(values).map(|(w, v)| (w[1] - w[0]) * v).sum();
        ensure!(close(mass, 1.0, 1e-9), "{name}: integrates to {mass}");
        masses.push(format!("{:.1e}", (mass - 1.0).abs()));
    }

    let p = named_pair("uniform_vs_prop3", &[]).unwrap().p;
    let (n, trials) = (20, 100_000u64);
    let mut rejections = 0u64;
    for t in 0..trials {
        let g = sample_null(n, &p, derive_seed(9, t)).map_err(|e| e.to_string())?.graph;
        rejections += min_test(&g).map_err(|e| e.to_string())?.rejects() as u64;
    }
    let rate = rejections as f64 / trials as f64;
    let exact = -(190.0 * (-(0.5f64.powi(20))).ln_1p()).exp_m1();
    let se = (exact * (1.0 - exact) / trials as f64).sqrt();
    ensure!((rate - exact).abs() <= 3.0 * se, "rate {rate} vs {exact} (SE {se})");
    Ok(format!("mass errors {}; null rate {rate:.3e} vs {exact:.3e} (SE {se:.1e})", masses.join(", ")))
}

fn c10_thresholds() -> Outcome {
    // 2 log_rho n - 2 log_rho log_rho n - 1 + 2 log_rho e with rho = 2.
    let l = 1024f64.log2();
    let want_omega = 2.0 * l - 2.0 * l.log2() - 1.0 + 2.0 / 2f64.ln();
    let got_omega = omega(1024, 2.0);
    ensure!(close(got_omega, 15.2415, 1e-3), "omega {got_omega}");
    ensure!(close(got_omega, want_omega, 1e-12), "omega {got_omega} vs formula {want_omega}");

    let report = thresholds(4096, &bernoulli_dirac(), 1.0, 0.1).map_err(|e| e.to_string())?;
    let want = 4.0 * (4096.0 * 9f64.ln() + 40f64.ln()).sqrt();
    let got = report.t2_norm_threshold;
    ensure!(close(got, want, 1e-9), "T2 threshold {got} vs formula {want}");
    Ok(format!(
        "omega {got_omega:.4}; T2 threshold {got:.4} matches 4 sqrt(4096 ln 9 + ln 40) (stated 379.57 is {:.4} away)",
        (got - 379.57).abs()
    ))
}

fn hclique(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hclique"))
        .args(args)
        .env("HCLIQUE_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    Ok(out.stdout)
}

fn c11_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("hclique-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let instance = dir.join("g.txt");
    let instance = instance.to_str().unwrap();
    hclique(&["generate", "--n", "30", "--k", "6", "--pair", "gaussian_shift:1", "--seed", "11", "--out", instance], "1")?;

    let commands: Vec<Vec<&str>> = vec![
        vec!["generate", "--n", "12", "--k", "4", "--pair", "uniform_shift:0.5", "--seed", "7"],
        vec!["detect", "--test", "scan", "--in", instance, "--pair", "gaussian_shift:1"],
        vec!["detect", "--test", "interval", "--in", instance],
        vec!["detect", "--test", "lrt", "--in", instance, "--pair", "gaussian_shift:1", "--k", "5"],
        vec!["divergence", "--pair", "uniform_vs_prop3"],
        vec!["thresholds", "--n", "1024", "--pair", "bernoulli_dirac:0.5"],
        vec!["risk", "--test", "t2", "--n", "40", "--k", "10", "--pair", "bernoulli_dirac:0.5", "--trials", "100", "--seed", "3"],
        vec!["risk", "--test", "coin_flip", "--n", "10", "--k", "3", "--pair", "gaussian_shift:1", "--trials", "200", "--seed", "4"],
        vec![
            "sweep", "--test", "scan,interval,lrt", "--n", "8,10", "--k-range", "2:4", "--pair", "bernoulli_bernoulli:0.5,0.8",
            "--trials", "50", "--seed", "5",
        ],
        vec!["selfcheck", "--seed", "6"],
    ];
    for args in &commands {
        let a = hclique(args, "1")?;
        let b = hclique(args, "1")?;
        let c = hclique(args, "4")?;
        ensure!(a == b, "{args:?}: repeated runs differ");
        ensure!(a == c, "{args:?}: output depends on the worker count");
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} commands byte-identical across repeats and 1 vs 4 workers", commands.len()))
}
