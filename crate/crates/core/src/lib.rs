//! Detection of a planted dense subgraph in a complete graph with random
//! real edge weights.
//!
//! Under the null hypothesis every edge weight is drawn i.i.d. from `P`.
//! Under the alternative, a uniformly random set of `k` vertices is chosen
//! and the weights of the edges inside it are drawn from `Q` instead. The
//! crate provides samplers for both models, the detection tests, the exact
//! likelihood-ratio test for small instances, divergences between `P` and
//! `Q`, threshold calculators and a Monte Carlo risk harness.

pub mod combinatorics;
pub mod detectors;
pub mod distributions;
pub mod divergences;
pub mod error;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod region;
pub mod risk;
pub mod rng;
pub mod selfcheck;
pub mod serde_ext;

pub use distributions::{named_pair, Distribution, DistributionPair, PairSpec};
pub use error::{Error, Result};
pub use region::{Interval, Region};
