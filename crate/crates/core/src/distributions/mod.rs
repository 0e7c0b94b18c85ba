//! Probability laws on the real line.
//!
//! A [`Distribution`] is a finite set of atoms plus an optional absolutely
//! continuous part. Densities are taken with respect to counting measure on
//! atoms and Lebesgue measure elsewhere, which lets a discrete law and a
//! continuous law share one dominating measure.

mod named;
mod pair;
mod dyadic;

pub use named::{named_pair, PairSpec, PAIR_NAMES};
pub use pair::DistributionPair;
pub use dyadic::dyadic_tail_density;

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};

/// Tolerance on total mass.
pub const MASS_TOL: f64 = 1e-9;

/// Half-width, in standard deviations, of the window treated as the bulk of
/// an unbounded density.
const BULK_SDS: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Normalized shape of the continuous part. Densities are right-continuous:
/// every piece is half-open `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
    /// `values[i]` is the density on `[edges[i], edges[i + 1])`.
    Piecewise { edges: Vec<f64>, values: Vec<f64> },
}

impl Shape {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDistribution(m));
        match self {
            Shape::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return bad(format!("uniform support [{lo}, {hi}) is empty or unbounded"));
                }
            }
            Shape::Normal { mean, sd } => {
                if !(mean.is_finite() && sd.is_finite() && *sd > 0.0) {
                    return bad(format!("normal({mean}, {sd}) needs a finite mean and positive sd"));
                }
            }
            Shape::Piecewise { edges, values } => {
                if edges.len() < 2 || values.len() + 1 != edges.len() {
                    return bad("piecewise density needs len(edges) = len(values) + 1 >= 2".into());
                }
                if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("piecewise edges must be finite and strictly increasing".into());
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return bad("piecewise values must be finite and nonnegative".into());
                }
                let total: f64 = self.piece_masses().iter().sum();
                if (total - 1.0).abs() > MASS_TOL {
                    return bad(format!("piecewise density integrates to {total}, not 1"));
                }
            }
        }
        Ok(())
    }

    fn piece_masses(&self) -> Vec<f64> {
        match self {
            Shape::Piecewise { edges, values } => edges
                .windows(2)
                .zip(values)
                .map(|(w, v)| v * (w[1] - w[0]))
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match self {
            Shape::Uniform { lo, hi } => {
                if x >= *lo && x < *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Shape::Normal { .. } => self.log_density(x).exp(),
            Shape::Piecewise { edges, values } => piece_index(edges, x).map_or(0.0, |i| values[i]),
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        match self {
            Shape::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                -0.5 * z * z - sd.ln() - 0.5 * (2.0 * PI).ln()
            }
            _ => self.density(x).ln(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Shape::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Shape::Normal { mean, sd } => 0.5 * erfc(-(x - mean) / (sd * SQRT_2)),
            Shape::Piecewise { edges, values } => {
                let mut acc = 0.0;
                for (w, v) in edges.windows(2).zip(values) {
                    if x <= w[0] {
                        break;
                    }
                    acc += v * (x.min(w[1]) - w[0]);
                }
                acc.min(1.0)
            }
        }
    }

    /// Inverse of [`Shape::cdf`] for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Shape::Uniform { lo, hi } => (lo + u * (hi - lo)).min(hi.next_down()),
            Shape::Normal { mean, sd } => {
                let x = mean - sd * SQRT_2 * erfc_inv(2.0 * u);
                // One Newton step; erfc_inv alone is good to ~1e-11.
                let pdf = self.density(x);
                if pdf > 0.0 {
                    x - (self.cdf(x) - u) / pdf
                } else {
                    x
                }
            }
            Shape::Piecewise { edges, values } => {
                let mut acc = 0.0;
                let mut last = 0;
                for (i, (w, v)) in edges.windows(2).zip(values).enumerate() {
                    let m = v * (w[1] - w[0]);
                    if m > 0.0 {
                        last = i;
                        if u < acc + m {
                            return (w[0] + (u - acc) / v).min(w[1].next_down());
                        }
                    }
                    acc += m;
                }
                // u sits in the rounding slack above the last positive piece.
                edges[last + 1].next_down()
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Shape::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
            _ => self.quantile(rng.random::<f64>()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Shape::Uniform { lo, hi } => 0.5 * (lo + hi),
            Shape::Normal { mean, .. } => *mean,
            Shape::Piecewise { edges, values } => edges
                .windows(2)
                .zip(values)
                .map(|(w, v)| 0.5 * v * (w[1] * w[1] - w[0] * w[0]))
                .sum(),
        }
    }

    /// True support, possibly unbounded.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Shape::Uniform { lo, hi } => (*lo, *hi),
            Shape::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Shape::Piecewise { edges, .. } => (edges[0], edges[edges.len() - 1]),
        }
    }

    /// Finite window holding all but a negligible amount of mass.
    pub fn bulk(&self) -> (f64, f64) {
        match self {
            Shape::Normal { mean, sd } => (mean - BULK_SDS * sd, mean + BULK_SDS * sd),
            _ => self.support(),
        }
    }

    /// Points where the density may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Shape::Uniform { lo, hi } => vec![*lo, *hi],
            Shape::Normal { .. } => Vec::new(),
            Shape::Piecewise { edges, .. } => edges.clone(),
        }
    }
}

fn piece_index(edges: &[f64], x: f64) -> Option<usize> {
    if !(x >= edges[0] && x < edges[edges.len() - 1]) {
        return None;
    }
    // Last edge <= x.
    Some(edges.partition_point(|&e| e <= x) - 1)
}

/// Continuous part: `weight` times a normalized shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousPart {
    pub weight: f64,
    pub shape: Shape,
}

/// A probability law on the real line. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    atoms: Vec<Atom>,
    continuous: Option<ContinuousPart>,
    mean: f64,
    label: String,
}

impl Distribution {
    /// Build and validate a law from atoms and an optional continuous shape.
    /// The continuous part receives whatever mass the atoms leave over.
    pub fn new(mut atoms: Vec<Atom>, shape: Option<Shape>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let bad = |m: String| Err(Error::InvalidDistribution(format!("{label}: {m}")));
        for a in &atoms {
            if !a.location.is_finite() {
                return bad(format!("atom location {} is not finite", a.location));
            }
            if !(a.mass > 0.0 && a.mass <= 1.0) {
                return bad(format!("atom mass {} outside (0, 1]", a.mass));
            }
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        if atoms.windows(2).any(|w| w[0].location == w[1].location) {
            return bad("atom locations must be distinct".into());
        }
        let atom_mass: f64 = atoms.iter().map(|a| a.mass).sum();
        let continuous = match shape {
            Some(shape) => {
                if let Err(e) = shape.validate() {
                    return bad(e.to_string());
                }
                let weight = 1.0 - atom_mass;
                if weight <= MASS_TOL {
                    return bad("atoms leave no mass for the continuous part".into());
                }
                Some(ContinuousPart { weight, shape })
            }
            None => {
                if (atom_mass - 1.0).abs() > MASS_TOL {
                    return bad(format!("atom masses sum to {atom_mass}, not 1"));
                }
                None
            }
        };
        let mean = atoms.iter().map(|a| a.location * a.mass).sum::<f64>()
            + continuous.as_ref().map_or(0.0, |c| c.weight * c.shape.mean());
        Ok(Distribution { atoms, continuous, mean, label })
    }

    pub fn dirac(x: f64) -> Result<Self> {
        Self::new(vec![Atom { location: x, mass: 1.0 }], None, format!("Dirac({x})"))
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", format!("Bernoulli parameter {p} outside (0, 1)")));
        }
        Self::new(
            vec![Atom { location: 0.0, mass: 1.0 - p }, Atom { location: 1.0, mass: p }],
            None,
            format!("Bern({p})"),
        )
    }

    /// Finitely supported law from `(location, mass)` pairs; zero masses are dropped.
    pub fn discrete(points: &[(f64, f64)]) -> Result<Self> {
        let atoms = points
            .iter()
            .filter(|(_, m)| *m > 0.0)
            .map(|&(location, mass)| Atom { location, mass })
            .collect();
        Self::new(atoms, None, "Discrete")
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Vec::new(), Some(Shape::Uniform { lo, hi }), format!("Unif({lo},{hi})"))
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Self::new(Vec::new(), Some(Shape::Normal { mean, sd }), format!("N({mean},{})", sd * sd))
    }

    pub fn piecewise(edges: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::new(Vec::new(), Some(Shape::Piecewise { edges, values }), label)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn continuous(&self) -> Option<&ContinuousPart> {
        self.continuous.as_ref()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_discrete(&self) -> bool {
        self.continuous.is_none()
    }

    /// Mass of the point `{x}`.
    pub fn atom_mass(&self, x: f64) -> f64 {
        self.atoms
            .binary_search_by(|a| a.location.total_cmp(&x))
            .map_or(0.0, |i| self.atoms[i].mass)
    }

    /// Lebesgue density of the continuous part (0 if there is none).
    pub fn continuous_density(&self, x: f64) -> f64 {
        self.continuous.as_ref().map_or(0.0, |c| c.weight * c.shape.density(x))
    }

    pub fn continuous_log_density(&self, x: f64) -> f64 {
        self.continuous
            .as_ref()
            .map_or(f64::NEG_INFINITY, |c| c.weight.ln() + c.shape.log_density(x))
    }

    /// Continuous-part mass of `[lo, hi]` (endpoint closure is irrelevant).
    pub fn continuous_mass(&self, lo: f64, hi: f64) -> f64 {
        self.continuous.as_ref().map_or(0.0, |c| {
            if hi <= lo {
                0.0
            } else {
                c.weight * (c.shape.cdf(hi) - c.shape.cdf(lo))
            }
        })
    }

    /// Probability of a region.
    pub fn prob(&self, region: &crate::region::Region) -> f64 {
        let from_atoms: f64 = self.atoms.iter().filter(|a| region.contains(a.location)).map(|a| a.mass).sum();
        let from_cont: f64 = region.intervals.iter().map(|iv| self.continuous_mass(iv.lo, iv.hi)).sum();
        from_atoms + from_cont
    }

    /// Smallest closed interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for a in &self.atoms {
            lo = lo.min(a.location);
            hi = hi.max(a.location);
        }
        if let Some(c) = &self.continuous {
            let (a, b) = c.shape.support();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// True if `x` can be produced by [`Distribution::sample`].
    pub fn in_support(&self, x: f64) -> bool {
        self.atom_mass(x) > 0.0 || self.continuous_density(x) > 0.0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.atoms.is_empty() {
            if let Some(c) = &self.continuous {
                return c.shape.sample(rng);
            }
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.mass;
            if u < acc {
                return a.location;
            }
        }
        match &self.continuous {
            Some(c) => c.shape.sample(rng),
            // Rounding slack in the atom masses.
            None => self.atoms[self.atoms.len() - 1].location,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn dirac_always_returns_its_point() {
        let d = Distribution::dirac(1.0).unwrap();
        let mut rng = stream(99);
        for _ in 0..100 {
            assert_eq!(d.sample(&mut rng), 1.0);
        }
    }

    #[test]
    fn bernoulli_sample_mean() {
        let d = Distribution::bernoulli(0.5).unwrap();
        let mut rng = stream(1);
        let n = 100_000;
        let mean = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn uniform_ks_statistic() {
        let d = Distribution::uniform(0.0, 1.0).unwrap();
        let mut rng = stream(2);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64 / n as f64 - x).abs().max((x - i as f64 / n as f64).abs()))
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "{ks}");
    }

    #[test]
    fn rejects_invalid_laws() {
        assert!(Distribution::bernoulli(0.0).is_err());
        assert!(Distribution::bernoulli(1.2).is_err());
        assert!(Distribution::uniform(1.0, 1.0).is_err());
        assert!(Distribution::normal(0.0, 0.0).is_err());
        assert!(Distribution::discrete(&[(0.0, 0.3), (1.0, 0.3)]).is_err());
        assert!(Distribution::new(
            vec![Atom { location: 0.0, mass: 0.5 }, Atom { location: 0.0, mass: 0.5 }],
            None,
            "dup"
        )
        .is_err());
        assert!(Distribution::piecewise(vec![0.0, 1.0], vec![0.9], "short").is_err());
    }

    #[test]
    fn densities_vanish_outside_support() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.continuous_density(-0.1), 0.0);
        assert_eq!(u.continuous_density(1.0), 0.0);
        assert_eq!(u.continuous_density(0.0), 1.0);
        assert!(u.in_support(0.5) && !u.in_support(1.5));
    }

    #[test]
    fn mixed_law_mass_and_mean() {
        let d = Distribution::new(
            vec![Atom { location: 2.0, mass: 0.25 }],
            Some(Shape::Uniform { lo: 0.0, hi: 1.0 }),
            "mix",
        )
        .unwrap();
        assert!((d.mean() - (0.5 + 0.375)).abs() < 1e-15);
        assert_eq!(d.support(), (0.0, 2.0));
        let mut rng = stream(3);
        let n = 100_000;
        let twos = (0..n).filter(|_| d.sample(&mut rng) == 2.0).count() as f64 / n as f64;
        assert!((twos - 0.25).abs() < 0.01);
    }

    #[test]
    fn normal_quantile_inverts_cdf() {
        let s = Shape::Normal { mean: 1.0, sd: 2.0 };
        for &u in &[0.001, 0.2, 0.5, 0.9, 0.999] {
            let err = (s.cdf(s.quantile(u)) - u).abs();
            assert!(err < 1e-12, "{u}: {err:e}");
        }
    }

    #[test]
    fn piecewise_quantile_inverts_cdf() {
        let s = Shape::Piecewise { edges: vec![0.0, 0.5, 1.0], values: vec![0.4, 1.6] };
        s.validate().unwrap();
        for &u in &[0.0, 0.1, 0.2, 0.5, 0.99] {
            assert!((s.cdf(s.quantile(u)) - u).abs() < 1e-12, "{u}");
        }
    }

    #[test]
    fn sample_means_within_five_standard_errors() {
        let laws = [
            Distribution::bernoulli(0.3).unwrap(),
            Distribution::uniform(1.0, 2.0).unwrap(),
            Distribution::normal(1.0, 1.0).unwrap(),
            Distribution::discrete(&[(-1.0, 0.2), (0.5, 0.5), (4.0, 0.3)]).unwrap(),
        ];
        let n = 100_000;
        for (i, d) in laws.iter().enumerate() {
            let mut rng = stream(10 + i as u64);
            let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            assert!((m - d.mean()).abs() < 5.0 * se, "{}: {m} vs {}", d.label(), d.mean());
        }
    }
}
