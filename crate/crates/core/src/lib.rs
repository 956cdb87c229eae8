//! Comparison-based clustering from triplet oracles: the exact partitioned
//! local depth pipeline, its nearest-neighbor approximation, and the Monte
//! Carlo laboratory that validates the approximation's probabilistic
//! machinery.
//!
//! The library is organized around one input object, [`ranking::RankingSystem`]
//! (a family of per-point total orders behind a counted triplet oracle), and
//! two pipelines:
//!
//! - [`pald`]: exact O(n³) conflict foci, cohesion matrix, local depth,
//!   threshold, and cluster graph;
//! - [`pannld`]: the K-nearest-neighbor variant that answers only
//!   promoted-pair comparisons and averages the rest in closed form.
//!
//! [`lab`] simulates the stranger randomization directly and checks the
//! closed forms statistically; [`io`] holds the CSV interfaces.

pub mod cluster;
pub mod error;
pub mod io;
pub mod lab;
pub mod neighbors;
pub mod pald;
pub mod pannld;
pub mod ranking;
mod util;

pub use cluster::{adjusted_rand_index, ClusterResult};
pub use error::{Axiom, Error, Result};
pub use neighbors::{KSpec, NeighborGraph, PairClass};
pub use pannld::phi::PhiMode;
pub use pannld::{run_pannld, PannldOutput, PannldParams};
pub use ranking::{DatasetSpec, RankingSystem};
