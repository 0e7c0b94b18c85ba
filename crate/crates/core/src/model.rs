//! Weighted complete graphs under the null and planted models.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{Distribution, DistributionPair};
use crate::error::{Error, Result};
use crate::rng;

/// Largest vertex count accepted by the samplers.
pub const MAX_VERTICES: usize = 1 << 15;

/// Symmetric edge weights of a complete graph, stored as the strict upper
/// triangle in row-major `(i < j)` order. The diagonal is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Wrap `n(n-1)/2` weights given in lexicographic `(i, j)` order.
    pub fn from_upper(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", format!("{n} < 2")));
        }
        if weights.len() != n * (n - 1) / 2 {
            return Err(Error::param(
                "weights",
                format!("expected {} entries for n = {n}, got {}", n * (n - 1) / 2, weights.len()),
            ));
        }
        Ok(WeightedGraph { n, weights })
    }

    /// Build from an edge function evaluated in lexicographic order.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut weights = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                weights.push(f(i, j));
            }
        }
        Self::from_upper(n, weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    /// Weights in lexicographic `(i < j)` order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// Weight of edge `{i, j}`, `i != j`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.weights[self.index(a, b)]
    }

    /// Iterate `(i, j, weight)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(self.weights.iter())
            .map(|((i, j), &w)| (i, j, w))
    }

    /// Apply `f` to every weight.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> WeightedGraph {
        WeightedGraph { n: self.n, weights: self.weights.iter().map(|&w| f(w)).collect() }
    }

    /// Relabel vertices: vertex `v` of `self` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> WeightedGraph {
        let mut out = vec![0.0; self.weights.len()];
        let tmp = WeightedGraph { n: self.n, weights: Vec::new() };
        for (i, j, w) in self.edges() {
            let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            out[tmp.index(a, b)] = w;
        }
        WeightedGraph { n: self.n, weights: out }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    H0,
    H1,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::H0 => "H0",
            Hypothesis::H1 => "H1",
        })
    }
}

impl FromStr for Hypothesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H0" => Ok(Hypothesis::H0),
            "H1" => Ok(Hypothesis::H1),
            _ => Err(Error::Parse(format!("unknown hypothesis `{s}`"))),
        }
    }
}

/// A sampled graph together with how it was generated.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub graph: WeightedGraph,
    /// Sorted planted vertices; present iff `hypothesis == H1`.
    pub hidden_set: Option<Vec<usize>>,
    pub hypothesis: Hypothesis,
    /// Planted-set size the instance was generated for (0 if unknown).
    pub k: usize,
    pub seed: u64,
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::param("n", format!("{n} < 2")));
    }
    if n > MAX_VERTICES {
        return Err(Error::param("n", format!("{n} exceeds the cap of {MAX_VERTICES}")));
    }
    Ok(())
}

/// Draw every edge weight i.i.d. from `p`.
pub fn sample_null(n: usize, p: &Distribution, seed: u64) -> Result<PlantedInstance> {
    check_n(n)?;
    let mut rng = rng::stream(seed);
    let graph = WeightedGraph::from_fn(n, |_, _| p.sample(&mut rng))?;
    Ok(PlantedInstance { graph, hidden_set: None, hypothesis: Hypothesis::H0, k: 0, seed })
}

/// Like [`sample_null`] but records `k` for the instance header.
pub fn sample_null_for(n: usize, k: usize, p: &Distribution, seed: u64) -> Result<PlantedInstance> {
    let mut inst = sample_null(n, p, seed)?;
    inst.k = k;
    Ok(inst)
}

/// Uniform `k`-subset of `0..n` by a partial Fisher-Yates shuffle, sorted.
pub fn random_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        perm.swap(i, j);
    }
    perm.truncate(k);
    perm.sort_unstable();
    perm
}

/// Plant a uniformly random `k`-set: weights inside it come from `q`, all
/// others from `p`. The subset is drawn first, then the weights in
/// lexicographic order, all from the one stream keyed by `seed`.
pub fn sample_planted(n: usize, k: usize, pair: &DistributionPair, seed: u64) -> Result<PlantedInstance> {
    check_n(n)?;
    if k < 2 || k > n {
        return Err(Error::param("k", format!("{k} outside [2, {n}]")));
    }
    let mut rng = rng::stream(seed);
    let hidden = random_subset(n, k, &mut rng);
    let mut inside = vec![false; n];
    for &v in &hidden {
        inside[v] = true;
    }
    let graph = WeightedGraph::from_fn(n, |i, j| {
        if inside[i] && inside[j] {
            pair.q.sample(&mut rng)
        } else {
            pair.p.sample(&mut rng)
        }
    })?;
    Ok(PlantedInstance { graph, hidden_set: Some(hidden), hypothesis: Hypothesis::H1, k, seed })
}

impl PlantedInstance {
    /// Text form: a header `n k hypothesis seed`, then one weight per line in
    /// lexicographic `(i, j)` order with 17 significant digits, then (for
    /// `H1`) the hidden set as space-separated vertex indices.
    pub fn to_text(&self) -> String {
        let g = &self.graph;
        let mut out = String::with_capacity(24 * g.edge_count() + 64);
        let _ = writeln!(out, "{} {} {} {}", g.n(), self.k, self.hypothesis, self.seed);
        for w in g.weights() {
            let _ = writeln!(out, "{w:.16e}");
        }
        if let Some(s) = &self.hidden_set {
            let vs: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", vs.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("header `{header}` must be `n k hypothesis seed`")));
        }
        let num = |s: &str, what: &str| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad {what} `{s}`")));
        let n = num(fields[0], "n")? as usize;
        let k = num(fields[1], "k")? as usize;
        let hypothesis: Hypothesis = fields[2].parse()?;
        let seed = num(fields[3], "seed")?;
        if n < 2 {
            return Err(Error::Parse(format!("n = {n} < 2")));
        }
        let m = n * (n - 1) / 2;
        let mut weights = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {m} weights, got {}", weights.len())))?;
            weights.push(line.parse::<f64>().map_err(|_| Error::Parse(format!("bad weight `{line}`")))?);
        }
        let hidden_set = match (hypothesis, lines.next()) {
            (Hypothesis::H1, Some(line)) => {
                let mut s = line
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad vertex `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                s.sort_unstable();
                if s.len() != k || s.windows(2).any(|w| w[0] == w[1]) || s.last().is_some_and(|&v| v >= n) {
                    return Err(Error::Parse(format!("hidden set must hold {k} distinct vertices below {n}")));
                }
                Some(s)
            }
            (Hypothesis::H1, None) => return Err(Error::Parse("H1 instance without hidden set".into())),
            (Hypothesis::H0, None) => None,
            (Hypothesis::H0, Some(extra)) => return Err(Error::Parse(format!("unexpected trailing line `{extra}`"))),
        };
        if lines.next().is_some() {
            return Err(Error::Parse("trailing data after instance".into()));
        }
        Ok(PlantedInstance { graph: WeightedGraph::from_upper(n, weights)?, hidden_set, hypothesis, k, seed })
    }
}
