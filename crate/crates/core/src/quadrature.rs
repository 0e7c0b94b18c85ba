//! Adaptive Simpson quadrature with caller-supplied breakpoints.
//!
//! The integration range is first cut at every breakpoint (density jumps,
//! atom locations), each piece is split into a few equal panels, and every
//! panel is refined by bisection until the Richardson error estimate falls
//! under its share of the global tolerance.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub rel_tol: f64,
    /// Absolute tolerance used when the integral itself is (close to) zero.
    pub abs_floor: f64,
    pub max_depth: u32,
    pub panels_per_piece: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rel_tol: 1e-9,
            abs_floor: 1e-14,
            max_depth: 48,
            panels_per_piece: 16,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

impl Quadrature {
    /// Integrate `f` over `[lo, hi]`, splitting at every breakpoint inside it.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64, breakpoints: &[f64]) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::QuadratureFailed { lo, hi });
        }
        if hi <= lo {
            return Ok(0.0);
        }
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&x| x > lo && x < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut panels = Vec::new();
        for w in cuts.windows(2) {
            let (a0, b0) = (w[0], w[1]);
            let step = (b0 - a0) / self.panels_per_piece as f64;
            for i in 0..self.panels_per_piece {
                let a = a0 + step * i as f64;
                let b = if i + 1 == self.panels_per_piece { b0 } else { a0 + step * (i + 1) as f64 };
                panels.push(self.panel(&f, a, b));
            }
        }
        let rough: f64 = panels.iter().map(|p| p.whole).sum();
        let scale: f64 = panels.iter().map(|p| p.whole.abs()).sum::<f64>().max(rough.abs());
        let tol = (self.rel_tol * scale).max(self.abs_floor);
        let width = hi - lo;

        let mut total = 0.0;
        let mut comp = 0.0;
        for p in panels {
            let share = tol * (p.b - p.a) / width;
            let v = self.refine(&f, p, share, 0, tol)?;
            let t = total + v;
            comp += if total.abs() >= v.abs() { (total - t) + v } else { (v - t) + total };
            total = t;
        }
        Ok(total + comp)
    }

    fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> Panel {
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        Panel {
            a,
            b,
            fa,
            fm,
            fb,
            whole: (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        }
    }

    fn refine<F: Fn(f64) -> f64>(&self, f: &F, p: Panel, tol: f64, depth: u32, global_tol: f64) -> Result<f64> {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let refined = left + right;
        let err = refined - p.whole;
        if !refined.is_finite() {
            return Err(Error::QuadratureFailed { lo: p.a, hi: p.b });
        }
        if err.abs() <= 15.0 * tol {
            return Ok(refined + err / 15.0);
        }
        if depth >= self.max_depth {
            // A jump that no breakpoint announced ends up here with a
            // vanishing panel width; accept it only if it is negligible.
            if err.abs() <= global_tol {
                return Ok(refined);
            }
            return Err(Error::QuadratureFailed { lo: p.a, hi: p.b });
        }
        let lp = Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left };
        let rp = Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right };
        Ok(self.refine(f, lp, 0.5 * tol, depth + 1, global_tol)?
            + self.refine(f, rp, 0.5 * tol, depth + 1, global_tol)?)
    }
}

/// Integrate with the default settings.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breakpoints: &[f64]) -> Result<f64> {
    Quadrature::default().integrate(f, lo, hi, breakpoints)
}
