use super::{Direction, TestVerdict, Witness};
use crate::error::{Error, Result};
use crate::model::WeightedGraph;

/// Beyond this `2^-n` is subnormal or zero and the test is meaningless.
pub const MIN_TEST_MAX_N: usize = 1022;

/// Reject iff the smallest edge weight is below `2^-n`. The witness is the
/// first edge attaining the minimum.
pub fn min_test(g: &WeightedGraph) -> Result<TestVerdict> {
    let n = g.n();
    if n > MIN_TEST_MAX_N {
        return Err(Error::param("n", format!("{n} > {MIN_TEST_MAX_N}: threshold 2^-n underflows")));
    }
    let (mut at, mut min) = ((0, 1), f64::INFINITY);
    for (i, j, w) in g.edges() {
        if w < min {
            min = w;
            at = (i, j);
        }
    }
    let threshold = 0.5f64.powi(n as i32);
    let witness = Witness { vertices: vec![at.0, at.1], interval: None };
    Ok(TestVerdict::new("min", min, threshold, Direction::Below, Some(witness)))
}
