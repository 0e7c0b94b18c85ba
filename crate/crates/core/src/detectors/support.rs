use super::{Direction, TestVerdict, Witness};
use crate::error::{Error, Result};
use crate::model::WeightedGraph;
use crate::region::Region;

/// Reject iff some edge weight falls in `set`, a region the null law gives
/// probability zero. The statistic is the number of such edges and the
/// witness lists their endpoints.
pub fn support_test(g: &WeightedGraph, set: &Region) -> Result<TestVerdict> {
    if set.is_empty() {
        return Err(Error::param("set", "support test needs a non-empty region"));
    }
    let mut hits = 0usize;
    let mut vertices = Vec::new();
    for (i, j, w) in g.edges() {
        if set.contains(w) {
            hits += 1;
            vertices.extend([i, j]);
        }
    }
    vertices.sort_unstable();
    vertices.dedup();
    let witness = (hits > 0).then_some(Witness { vertices, interval: None });
    Ok(TestVerdict::new("support", hits as f64, 0.0, Direction::Above, witness))
}
