use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{dyadic_tail_density, Distribution, DistributionPair};
use crate::error::{Error, Result};

pub const PAIR_NAMES: &[&str] = &[
    "bernoulli_dirac",
    "bernoulli_bernoulli",
    "uniform_shift",
    "gaussian_shift",
    "uniform_vs_prop3",
    "disjoint_uniform",
];

/// Default truncation depth of the dyadic construction.
const DYADIC_DEPTH: usize = 64;

/// A named pair with its parameters, as written on the command line
/// (`name:param1,param2`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSpec {
    pub name: String,
    pub params: Vec<f64>,
}

impl PairSpec {
    pub fn build(&self) -> Result<DistributionPair> {
        named_pair(&self.name, &self.params)
    }
}

impl FromStr for PairSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let params = rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| Error::param("pair", format!("bad number `{t}` in `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(PairSpec { name: name.trim().to_string(), params })
    }
}

impl fmt::Display for PairSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, ":{}", ps.join(","))?;
        }
        Ok(())
    }
}

fn arity(name: &str, params: &[f64], min: usize, max: usize) -> Result<()> {
    if params.len() < min || params.len() > max {
        return Err(Error::param(
            "pair",
            format!("`{name}` takes {min}..={max} parameters, got {}", params.len()),
        ));
    }
    Ok(())
}

/// Build one of the predefined `(P, Q)` pairs.
///
/// | name | params | P | Q |
/// |---|---|---|---|
/// | `bernoulli_dirac` | `p` | Bern(p) | Dirac(1) |
/// | `bernoulli_bernoulli` | `p, q` | Bern(p) | Bern(q) |
/// | `uniform_shift` | `s` in `[0, 1)` | Unif(0,1) | Unif(s, 1+s) |
/// | `gaussian_shift` | `mu [, sd]` | N(0, sd²) | N(mu, sd²) |
/// | `uniform_vs_prop3` | `[alpha [, depth]]` | Unif(0,1) | dyadic tail density with `k'_m = ceil(m^alpha)` |
/// | `disjoint_uniform` | none | Unif(0,1) | Unif(1,2) |
pub fn named_pair(name: &str, params: &[f64]) -> Result<DistributionPair> {
    let (p, q) = match name {
        "bernoulli_dirac" => {
            arity(name, params, 1, 1)?;
            (Distribution::bernoulli(params[0])?, Distribution::dirac(1.0)?)
        }
        "bernoulli_bernoulli" => {
            arity(name, params, 2, 2)?;
            (Distribution::bernoulli(params[0])?, Distribution::bernoulli(params[1])?)
        }
        "uniform_shift" => {
            arity(name, params, 1, 1)?;
            let s = params[0];
            if !(0.0..1.0).contains(&s) {
                return Err(Error::param("s", format!("shift {s} outside [0, 1)")));
            }
            (Distribution::uniform(0.0, 1.0)?, Distribution::uniform(s, 1.0 + s)?)
        }
        "gaussian_shift" => {
            arity(name, params, 1, 2)?;
            let sd = params.get(1).copied().unwrap_or(1.0);
            if !params[0].is_finite() {
                return Err(Error::param("mu", "must be finite"));
            }
            (Distribution::normal(0.0, sd)?, Distribution::normal(params[0], sd)?)
        }
        "uniform_vs_prop3" => {
            arity(name, params, 0, 2)?;
            let alpha = params.first().copied().unwrap_or(1.0);
            if !(alpha > 0.0 && alpha <= 8.0) {
                return Err(Error::param("alpha", format!("{alpha} outside (0, 8]")));
            }
            let depth = match params.get(1) {
                None => DYADIC_DEPTH,
                Some(&d) if d >= 2.0 && d <= 1000.0 && d.fract() == 0.0 => d as usize,
                Some(&d) => return Err(Error::param("depth", format!("{d} is not an integer in [2, 1000]"))),
            };
            let kprime: Vec<u64> = (1..=depth).map(|m| (m as f64).powf(alpha).ceil().max(1.0) as u64).collect();
            (Distribution::uniform(0.0, 1.0)?, dyadic_tail_density(&kprime, depth)?)
        }
        "disjoint_uniform" => {
            arity(name, params, 0, 0)?;
            (Distribution::uniform(0.0, 1.0)?, Distribution::uniform(1.0, 2.0)?)
        }
        other => return Err(Error::UnknownPair(other.to_string())),
    };
    Ok(DistributionPair::new(p, q))
}
