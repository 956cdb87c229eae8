//! Side-by-side run of both pipelines on the same input: call counts, step
//! counts, partition agreement, and cohesion deltas on the promoted support.

use pannld_core::cluster::adjusted_rand_index;
use pannld_core::error::{Error, Result};
use pannld_core::pald;
use pannld_core::pannld::{run_pannld, PannldParams};
use pannld_core::{KSpec, PhiMode};
use serde::Serialize;

use crate::config::InputSpec;

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub n: usize,
    pub k: usize,
    pub ari: f64,
    pub tau_exact: f64,
    pub tau_approx: f64,
    pub oracle_calls_exact: u64,
    /// Oracle calls of the approximate pipeline (neighbor selection plus
    /// restricted sorting).
    pub oracle_calls_approx: u64,
    /// Approximate-pipeline comparisons including rank-table lookups.
    pub comparisons_approx: u64,
    pub inner_steps_exact: u64,
    pub inner_steps_approx: u64,
    /// comparisons_approx / oracle_calls_exact; reported, not asserted.
    pub comparison_ratio: f64,
    pub max_abs_cohesion_delta: f64,
    pub mean_abs_cohesion_delta: f64,
    pub component_sizes_exact: Vec<usize>,
    pub component_sizes_approx: Vec<usize>,
}

pub fn compare_pipelines(
    input: &InputSpec,
    k: usize,
    phi_mode: PhiMode,
    degree_cap: Option<usize>,
    pald_cap: usize,
) -> Result<CompareReport> {
    let (_ids, rs) = input.load()?;
    let n = rs.n();
    if n > pald_cap {
        return Err(Error::InvalidInput(format!(
            "comparison runs the exact O(n^3) pipeline; n = {n} exceeds the cap {pald_cap}. \
             Reduce the input or raise --cap"
        )));
    }

    let before = rs.oracle().calls();
    let tables = rs.full_tables()?;
    let exact = pald::cohesion_matrix_exact(&tables)?;
    let exact_cluster = pald::cluster_graph(&exact.cohesion, exact.tau);
    let oracle_calls_exact = rs.oracle().calls() - before;

    let params = PannldParams {
        k: KSpec::Uniform(k),
        phi_mode,
        degree_cap,
    };
    let approx = run_pannld(&rs, &params)?;

    let ari = adjusted_rand_index(&exact_cluster.labels, &approx.cluster.labels);

    let mut max_delta = 0.0f64;
    let mut sum_delta = 0.0f64;
    let mut entries = 0usize;
    for x in 0..n {
        let d = (approx.cohesion.get(x, x)? - exact.cohesion.get(x, x)).abs();
        max_delta = max_delta.max(d);
        sum_delta += d;
        entries += 1;
        for &v in approx.graph.promoted(x) {
            let d = (approx.cohesion.get(x, v)? - exact.cohesion.get(x, v)).abs();
            max_delta = max_delta.max(d);
            sum_delta += d;
            entries += 1;
        }
    }

    let comparisons_approx = approx.diagnostics.comparisons();
    Ok(CompareReport {
        n,
        k,
        ari,
        tau_exact: exact.tau,
        tau_approx: approx.tau,
        oracle_calls_exact,
        oracle_calls_approx: approx.diagnostics.knn_oracle_calls
            + approx.diagnostics.sort_oracle_calls,
        comparisons_approx,
        inner_steps_exact: exact.inner_steps,
        inner_steps_approx: approx.diagnostics.total_steps(),
        comparison_ratio: comparisons_approx as f64 / oracle_calls_exact as f64,
        max_abs_cohesion_delta: max_delta,
        mean_abs_cohesion_delta: sum_delta / entries as f64,
        component_sizes_exact: exact_cluster.component_sizes,
        component_sizes_approx: approx.cluster.component_sizes,
    })
}
