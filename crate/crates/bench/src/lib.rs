//! Shared helpers for the pipeline benchmarks.

use pannld_core::ranking::{gen_euclidean, RankingSystem};

/// Seeded uniform instance reused across benchmark groups.
pub fn instance(n: usize) -> RankingSystem {
    gen_euclidean(n, 2, 7).expect("valid benchmark instance")
}
