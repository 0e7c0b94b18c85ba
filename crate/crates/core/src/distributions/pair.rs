use serde::Serialize;

use super::Distribution;
use crate::error::{Error, Result};
use crate::region::{Interval, Region};

/// A null law `p` and a planted law `q` over one dominating measure:
/// counting measure on the union of both atom sets plus Lebesgue measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionPair {
    pub p: Distribution,
    pub q: Distribution,
    dominating_atoms: Vec<f64>,
    abs_continuous: bool,
}

impl DistributionPair {
    pub fn new(p: Distribution, q: Distribution) -> Self {
        let mut dominating_atoms: Vec<f64> =
            p.atoms().iter().chain(q.atoms()).map(|a| a.location).collect();
        dominating_atoms.sort_by(f64::total_cmp);
        dominating_atoms.dedup();
        let mut pair = DistributionPair { p, q, dominating_atoms, abs_continuous: false };
        pair.abs_continuous = pair.null_region().is_empty();
        pair
    }

    /// Union of the atom locations of both laws.
    pub fn dominating_atoms(&self) -> &[f64] {
        &self.dominating_atoms
    }

    /// Whether `q` is absolutely continuous with respect to `p`.
    pub fn abs_continuous(&self) -> bool {
        self.abs_continuous
    }

    pub fn is_dominating_atom(&self, x: f64) -> bool {
        self.dominating_atoms.binary_search_by(|a| a.total_cmp(&x)).is_ok()
    }

    /// `(ln p(x), ln q(x))` with respect to the dominating measure.
    pub fn log_densities(&self, x: f64) -> (f64, f64) {
        if self.is_dominating_atom(x) {
            (self.p.atom_mass(x).ln(), self.q.atom_mass(x).ln())
        } else {
            (self.p.continuous_log_density(x), self.q.continuous_log_density(x))
        }
    }

    /// `ln(q(x) / p(x))`: `-inf` where only `q` vanishes, `+inf` where only
    /// `p` vanishes.
    pub fn log_ratio(&self, x: f64) -> Result<f64> {
        let (lp, lq) = self.log_densities(x);
        match (lp == f64::NEG_INFINITY, lq == f64::NEG_INFINITY) {
            (true, true) => Err(Error::UndefinedRatio(x)),
            (true, false) => Ok(f64::INFINITY),
            (false, true) => Ok(f64::NEG_INFINITY),
            (false, false) => Ok(lq - lp),
        }
    }

    /// Cut points of both continuous parts, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = [&self.p, &self.q]
            .iter()
            .filter_map(|d| d.continuous())
            .flat_map(|c| c.shape.breakpoints())
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Finite window covering the bulk of both continuous parts; `None` if
    /// both laws are discrete.
    pub fn continuous_window(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in [&self.p, &self.q].iter().filter_map(|d| d.continuous()) {
            let (a, b) = c.shape.bulk();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo < hi).then_some((lo, hi))
    }

    /// Open segments of the line between consecutive breakpoints, with
    /// unbounded end segments. Within each segment, whether either
    /// continuous density vanishes does not change.
    pub(crate) fn segments(&self) -> Vec<(f64, f64)> {
        let mut cuts = vec![f64::NEG_INFINITY];
        cuts.extend(self.breakpoints());
        cuts.push(f64::INFINITY);
        cuts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| a < b).collect()
    }

    /// Region of positive `Q` mass and zero `P` mass. Empty iff `Q << P`.
    pub fn null_region(&self) -> Region {
        let atoms: Vec<f64> = self
            .q
            .atoms()
            .iter()
            .filter(|a| self.p.atom_mass(a.location) == 0.0)
            .map(|a| a.location)
            .collect();
        let mut intervals: Vec<Interval> = Vec::new();
        for (a, b) in self.segments() {
            let x = representative(a, b);
            if self.q.continuous_density(x) > 0.0 && self.p.continuous_density(x) == 0.0 {
                match intervals.last_mut() {
                    Some(last) if last.hi == a => last.hi = b,
                    _ => intervals.push(Interval::closed_open(a, b)),
                }
            }
        }
        let mut region = Region::new(Vec::new(), intervals);
        for a in self.p.atoms() {
            region.punch(a.location);
        }
        region.atoms = atoms;
        region
    }

    /// Support hull `[a, b]` of both laws.
    pub fn support_hull(&self) -> (f64, f64) {
        let (pa, pb) = self.p.support();
        let (qa, qb) = self.q.support();
        (pa.min(qa), pb.max(qb))
    }
}

/// An interior point of `(a, b)`, which may be unbounded on either side.
pub(crate) fn representative(a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    }
}
