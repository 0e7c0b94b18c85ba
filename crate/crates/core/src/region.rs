//! Finite descriptions of measurable subsets of the real line: a list of
//! isolated points plus a list of intervals with explicit endpoint closure.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "crate::serde_ext")]
    pub lo: f64,
    #[serde(with = "crate::serde_ext")]
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    /// Half-open `[lo, hi)`.
    pub fn closed_open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: lo.is_finite(), hi_closed: false }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// True when the interval contains no point at all.
    pub fn is_void(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    /// Lebesgue length.
    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A set made of isolated points and intervals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub atoms: Vec<f64>,
    pub intervals: Vec<Interval>,
}

impl Region {
    pub fn new(mut atoms: Vec<f64>, intervals: Vec<Interval>) -> Self {
        atoms.sort_by(f64::total_cmp);
        atoms.dedup();
        let intervals = intervals.into_iter().filter(|i| !i.is_void()).collect();
        Region { atoms, intervals }
    }

    pub fn interval(iv: Interval) -> Self {
        Region::new(Vec::new(), vec![iv])
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.intervals.iter().all(Interval::is_void)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.atoms.iter().any(|&a| a == x) || self.intervals.iter().any(|i| i.contains(x))
    }

    /// Remove the single point `x` from every interval, splitting where needed.
    pub fn punch(&mut self, x: f64) {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        for iv in self.intervals.drain(..) {
            if !iv.contains(x) {
                out.push(iv);
                continue;
            }
            let left = Interval { hi: x, hi_closed: false, ..iv };
            let right = Interval { lo: x, lo_closed: false, ..iv };
            out.extend([left, right].into_iter().filter(|i| !i.is_void()));
        }
        self.intervals = out;
        self.atoms.retain(|&a| a != x);
    }

    /// Parse `;`-separated items: `{x}` for a point, `[a,b)`-style intervals.
    /// `inf` and `-inf` are accepted as endpoints.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("region `{text}`: {why}"));
        let mut atoms = Vec::new();
        let mut intervals = Vec::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(inner) = item.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
                for tok in inner.split(',') {
                    atoms.push(parse_endpoint(tok).ok_or_else(|| bad("bad point"))?);
                }
                continue;
            }
            let mut chars = item.chars();
            let open = chars.next().ok_or_else(|| bad("empty item"))?;
            let close = chars.next_back().ok_or_else(|| bad("empty item"))?;
            let lo_closed = match open {
                '[' => true,
                '(' => false,
                _ => return Err(bad("expected `[` or `(`")),
            };
            let hi_closed = match close {
                ']' => true,
                ')' => false,
                _ => return Err(bad("expected `]` or `)`")),
            };
            let body = chars.as_str();
            let (a, b) = body.split_once(',').ok_or_else(|| bad("expected `lo,hi`"))?;
            let lo = parse_endpoint(a).ok_or_else(|| bad("bad lower endpoint"))?;
            let hi = parse_endpoint(b).ok_or_else(|| bad("bad upper endpoint"))?;
            if lo > hi {
                return Err(bad("lower endpoint exceeds upper"));
            }
            intervals.push(Interval { lo, hi, lo_closed, hi_closed });
        }
        Ok(Region::new(atoms, intervals))
    }
}

fn parse_endpoint(tok: &str) -> Option<f64> {
    match tok.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.atoms.iter().map(|a| format!("{{{a}}}")).collect();
        parts.extend(self.intervals.iter().map(|i| i.to_string()));
        if parts.is_empty() {
            f.write_str("{}")
        } else {
            f.write_str(&parts.join(";"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_respects_closure() {
        let r = Region::parse("(1,2]").unwrap();
        assert!(!r.contains(1.0));
        assert!(r.contains(1.5));
        assert!(r.contains(2.0));
        let r = Region::parse("{0};[3,inf)").unwrap();
        assert!(r.contains(0.0) && r.contains(1e300) && !r.contains(2.9));
    }

    #[test]
    fn punch_splits() {
        let mut r = Region::parse("[0,2)").unwrap();
        r.punch(1.0);
        assert_eq!(r.intervals.len(), 2);
        assert!(!r.contains(1.0));
        assert!(r.contains(0.0) && r.contains(0.999) && r.contains(1.001));
    }

    #[test]
    fn parse_display_round_trip() {
        let text = "{0.5};[0,1);(1,inf]";
        let r = Region::parse(text).unwrap();
        assert_eq!(Region::parse(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn parse_errors() {
        assert!(Region::parse("[2,1]").is_err());
        assert!(Region::parse("<1,2>").is_err());
        assert!(Region::parse("[1;2]").is_err());
        assert!(Region::parse("").unwrap().is_empty());
    }
}
