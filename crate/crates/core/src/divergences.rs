//! Divergences between the two laws of a [`DistributionPair`].
//!
//! Every quantity is a sum over the atoms of the dominating measure plus an
//! integral of the continuous densities, evaluated by adaptive quadrature
//! split at every density breakpoint.

use serde::Serialize;

use crate::distributions::DistributionPair;
use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::region::{Interval, Region};

/// Default number of continuous sign changes allowed in `{p > q}`.
pub const INTERVAL_BUDGET: usize = 64;

/// Points in the sign scan of `p - q`.
const SCAN_POINTS: usize = 4096;

/// Bisection stops once the bracket is this narrow.
const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceReport {
    /// Total variation distance.
    pub tv: f64,
    /// `D_KL(Q || P)`; `+inf` unless `Q << P`.
    #[serde(with = "crate::serde_ext")]
    pub kl: f64,
    /// `chi^2(Q || P) = E_P[(q/p - 1)^2]`; `+inf` unless `Q << P`.
    #[serde(with = "crate::serde_ext")]
    pub chi2: f64,
    /// Squared Hellinger distance with the 1/2 normalization.
    pub hellinger_sq: f64,
    /// Bhattacharyya coefficient.
    pub bhattacharyya: f64,
    /// `1 + chi2`.
    #[serde(with = "crate::serde_ext")]
    pub rho: f64,
}

/// Per-point integrands in terms of log-densities, so that Gaussian tails
/// underflow gracefully.
fn tv_term(lp: f64, lq: f64) -> f64 {
    (lp.exp() - lq.exp()).abs()
}

fn kl_term(lp: f64, lq: f64) -> f64 {
    if lq == f64::NEG_INFINITY || lp == f64::NEG_INFINITY {
        // q = 0 contributes nothing; p = 0 < q only happens off Q << P,
        // which is screened out before integrating.
        0.0
    } else {
        lq.exp() * (lq - lp)
    }
}

fn chi2_term(lp: f64, lq: f64) -> f64 {
    if lp == f64::NEG_INFINITY {
        0.0
    } else {
        let r = (lq - lp).exp() - 1.0;
        lp.exp() * r * r
    }
}

fn hellinger_term(lp: f64, lq: f64) -> f64 {
    let d = (0.5 * lq).exp() - (0.5 * lp).exp();
    d * d
}

fn bc_term(lp: f64, lq: f64) -> f64 {
    (0.5 * (lp + lq)).exp()
}

struct Integrator<'a> {
    pair: &'a DistributionPair,
    quad: Quadrature,
}

impl Integrator<'_> {
    /// Atom sum plus continuous integral of `term(ln p, ln q)`.
    fn total(&self, term: impl Fn(f64, f64) -> f64, widen: f64) -> Result<f64> {
        let pair = self.pair;
        let atoms: f64 = pair
            .dominating_atoms()
            .iter()
            .map(|&x| term(pair.p.atom_mass(x).ln(), pair.q.atom_mass(x).ln()))
            .sum();
        let cont = match pair.continuous_window() {
            None => 0.0,
            Some((lo, hi)) => self.quad.integrate(
                |x| term(pair.p.continuous_log_density(x), pair.q.continuous_log_density(x)),
                lo - widen,
                hi + widen,
                &pair.breakpoints(),
            )?,
        };
        Ok(atoms + cont)
    }
}

/// All five divergences plus `rho`.
pub fn divergences(pair: &DistributionPair) -> Result<DivergenceReport> {
    let it = Integrator { pair, quad: Quadrature::default() };
    let tv = (0.5 * it.total(tv_term, 0.0)?).clamp(0.0, 1.0);
    let hellinger_sq = (0.5 * it.total(hellinger_term, 0.0)?).clamp(0.0, 1.0);
    let bhattacharyya = it.total(bc_term, 0.0)?.clamp(0.0, 1.0);
    let (kl, chi2) = if pair.abs_continuous() {
        // q^2/p peaks at the mean reflected through p's mean; widen the
        // window so that bump is covered.
        let shift = (pair.q.mean() - pair.p.mean()).abs();
        (it.total(kl_term, 0.0)?.max(0.0), it.total(chi2_term, shift)?.max(0.0))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(DivergenceReport { tv, kl, chi2, hellinger_sq, bhattacharyya, rho: 1.0 + chi2 })
}

/// The set `{x : p(x) > q(x)}` together with `P(A) - Q(A)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySet {
    pub region: Region,
    pub p_mass: f64,
    pub q_mass: f64,
    /// `P(A) - Q(A)`, equal to the total variation distance.
    pub separation: f64,
}

/// Locate `A = {p > q}` and return `P(A) - Q(A)` with the default interval
/// budget.
pub fn tv_via_density_set(pair: &DistributionPair) -> Result<DensitySet> {
    tv_via_density_set_with_budget(pair, INTERVAL_BUDGET)
}

pub fn tv_via_density_set_with_budget(pair: &DistributionPair, budget: usize) -> Result<DensitySet> {
    let atoms: Vec<f64> = pair
        .dominating_atoms()
        .iter()
        .copied()
        .filter(|&x| pair.p.atom_mass(x) > pair.q.atom_mass(x))
        .collect();
    let mut region = Region::new(Vec::new(), continuous_excess_set(pair, budget)?);
    for &x in pair.dominating_atoms() {
        region.punch(x);
    }
    region.atoms = atoms;
    let p_mass = pair.p.prob(&region);
    let q_mass = pair.q.prob(&region);
    Ok(DensitySet { region, p_mass, q_mass, separation: p_mass - q_mass })
}

/// Intervals where the continuous density of `p` exceeds that of `q`.
fn continuous_excess_set(pair: &DistributionPair, budget: usize) -> Result<Vec<Interval>> {
    let Some((lo, hi)) = pair.continuous_window() else {
        return Ok(Vec::new());
    };
    let above = |x: f64| pair.p.continuous_log_density(x) > pair.q.continuous_log_density(x);

    // Grid of scan points plus every breakpoint; densities are
    // right-continuous, so each cell [g_i, g_{i+1}) starts at its left end.
    let mut grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / SCAN_POINTS as f64)
        .chain(pair.breakpoints().into_iter().filter(|&b| b > lo && b < hi))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    // Transitions (x, state after x), starting from the left tail.
    let mut state = above(lo - (hi - lo));
    let mut transitions: Vec<(f64, bool)> = vec![(f64::NEG_INFINITY, state)];
    let push = |x: f64, s: bool, state: &mut bool, transitions: &mut Vec<(f64, bool)>| -> Result<()> {
        if s != *state {
            transitions.push((x, s));
            *state = s;
            if transitions.len() > budget + 1 {
                return Err(Error::TooManySignChanges { budget });
            }
        }
        Ok(())
    };
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let sa = above(a);
        push(a, sa, &mut state, &mut transitions)?;
        // Just left of b, inside the same cell.
        let b_in = b - (b - a) * 1e-9;
        if above(b_in) != sa {
            let (mut l, mut r) = (a, b_in);
            while r - l > SIGN_TOL * (1.0 + l.abs()) {
                let m = 0.5 * (l + r);
                if above(m) == sa {
                    l = m;
                } else {
                    r = m;
                }
            }
            push(r, !sa, &mut state, &mut transitions)?;
        }
    }
    let last = grid[grid.len() - 1];
    push(last, above(last), &mut state, &mut transitions)?;
    let tail = above(hi + (hi - lo));
    push(last, tail, &mut state, &mut transitions)?;

    let mut intervals = Vec::new();
    let mut open: Option<f64> = None;
    for &(x, s) in &transitions {
        match (s, open) {
            (true, None) => open = Some(x),
            (false, Some(start)) => {
                intervals.push(Interval::closed_open(start, x));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        intervals.push(Interval::closed_open(start, f64::INFINITY));
    }
    Ok(intervals)
}
