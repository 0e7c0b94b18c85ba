use super::{Direction, TestVerdict, Witness};
use crate::combinatorics::pairs;
use crate::error::{Error, Result};
use crate::model::WeightedGraph;
use crate::region::Interval;

/// Interval scan test: reject iff some interval `I` captures a set `F` of
/// edges with `|F| >= k` spanning at most `k` vertices.
///
/// The trace of an interval on the data is a contiguous run of the sorted
/// weights that never splits a group of equal weights, so the search runs
/// over such windows with `k <= |F| <= C(k, 2)` (more edges cannot fit on
/// `k` vertices). The statistic is the fewest vertices spanned by any such
/// window (`+inf` if there is none) and `H0` is rejected when it is below
/// `k + 1`. The witness is the qualifying window with the most edges,
/// earliest first.
pub fn interval_scan_test(g: &WeightedGraph, k: usize) -> Result<TestVerdict> {
    let n = g.n();
    if k < 2 || 2 * k > n {
        return Err(Error::param("k", format!("{k} outside [2, n/2] for n = {n}")));
    }
    let cap = pairs(k);

    let mut order: Vec<(f64, u32, u32)> = g.edges().map(|(i, j, w)| (w, i as u32, j as u32)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut groups = vec![0];
    for (idx, pair) in order.windows(2).enumerate() {
        if pair[0].0 != pair[1].0 {
            groups.push(idx + 1);
        }
    }
    groups.push(order.len());

    let mut degree = vec![0u32; n];
    let mut touched: Vec<usize> = Vec::with_capacity(2 * cap);
    let mut fewest = usize::MAX;
    let mut best: Option<(usize, usize, usize)> = None;

    for gs in 0..groups.len() - 1 {
        let start = groups[gs];
        let mut verts = 0usize;
        for ge in gs..groups.len() - 1 {
            let end = groups[ge + 1];
            if end - start > cap {
                break;
            }
            for &(_, i, j) in &order[groups[ge]..end] {
                for v in [i as usize, j as usize] {
                    if degree[v] == 0 {
                        verts += 1;
                        touched.push(v);
                    }
                    degree[v] += 1;
                }
            }
            let edges = end - start;
            if edges >= k {
                fewest = fewest.min(verts);
                if verts <= k && best.is_none_or(|(_, _, e)| edges > e) {
                    best = Some((start, end, edges));
                }
            }
        }
        for v in touched.drain(..) {
            degree[v] = 0;
        }
    }

    let statistic = if fewest == usize::MAX { f64::INFINITY } else { fewest as f64 };
    let witness = best.map(|(s, e, _)| {
        let mut vertices: Vec<usize> = order[s..e].iter().flat_map(|&(_, i, j)| [i as usize, j as usize]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let interval = Interval { lo: order[s].0, hi: order[e - 1].0, lo_closed: true, hi_closed: true };
        Witness { vertices, interval: Some(interval) }
    });
    Ok(TestVerdict::new("interval", statistic, (k + 1) as f64, Direction::Below, witness))
}
