//! Batch execution: load input, run the selected pipeline, write artifacts.
//!
//! Every run leaves in its output directory: `labels.csv`, `cohesion.csv`,
//! `edges.csv` (mutual-cohesion weights), `summary.json`, and the exact
//! `config.json` that reproduces it.

use std::time::Instant;

use pannld_core::error::{Error, Result};
use pannld_core::io;
use pannld_core::pald;
use pannld_core::pannld::{run_pannld, PannldParams};
use pannld_core::KSpec;

use crate::config::{Pipeline, RunConfig};
use crate::summary::{validate_summary, Summary};

pub fn run(config: &RunConfig) -> Result<Summary> {
    let started = Instant::now();
    std::fs::create_dir_all(&config.out_dir)?;
    let (ids, rs) = config.input.load()?;
    let n = rs.n();

    let summary = match config.pipeline {
        Pipeline::Pald => {
            if n > config.pald_cap && !config.force {
                return Err(Error::InvalidInput(format!(
                    "exact pipeline is O(n^3) and n = {n} exceeds the cap {}; \
                     rerun with --force or use the approximate pipeline",
                    config.pald_cap
                )));
            }
            let before = rs.oracle().calls();
            let tables = rs.full_tables()?;
            let exact = pald::cohesion_matrix_exact(&tables)?;
            let cluster = pald::cluster_graph(&exact.cohesion, exact.tau);
            let oracle_calls = rs.oracle().calls() - before;

            io::write_labels_csv(&config.out_dir.join("labels.csv"), &ids, &cluster.labels)?;
            io::write_dense_cohesion_csv(
                &config.out_dir.join("cohesion.csv"),
                &ids,
                &exact.cohesion,
            )?;
            let mut weights = Vec::new();
            for x in 0..n {
                for y in (x + 1)..n {
                    let w = exact.cohesion.mutual_weight(x, y);
                    if w > 0.0 {
                        weights.push((x, y, w));
                    }
                }
            }
            io::write_edges_csv(&config.out_dir.join("edges.csv"), &ids, &weights)?;

            Summary {
                n,
                k: None,
                tau: exact.tau,
                tau_p: None,
                tau_r: None,
                component_sizes: cluster.component_sizes,
                oracle_calls,
                inner_steps: exact.inner_steps,
                wall_time: started.elapsed().as_secs_f64(),
            }
        }
        Pipeline::Pannld => {
            let k = config.k.ok_or_else(|| {
                Error::InvalidInput("the approximate pipeline needs --k".into())
            })?;
            let params = PannldParams {
                k: KSpec::Uniform(k),
                phi_mode: config.phi_mode,
                degree_cap: config.degree_cap,
            };
            let out = run_pannld(&rs, &params)?;

            io::write_labels_csv(
                &config.out_dir.join("labels.csv"),
                &ids,
                &out.cluster.labels,
            )?;
            io::write_sparse_cohesion_csv(
                &config.out_dir.join("cohesion.csv"),
                &ids,
                &out.cohesion,
            )?;
            let mut weights = Vec::new();
            for (x, y) in out.graph.promoted_edges() {
                weights.push((x, y, out.cohesion.mutual_weight(x, y)?));
            }
            io::write_edges_csv(&config.out_dir.join("edges.csv"), &ids, &weights)?;

            Summary {
                n,
                k: Some(k),
                tau: out.tau,
                tau_p: Some(out.tau_p),
                tau_r: Some(out.tau_r),
                component_sizes: out.cluster.component_sizes,
                oracle_calls: out.diagnostics.knn_oracle_calls + out.diagnostics.comparisons(),
                inner_steps: out.diagnostics.total_steps(),
                wall_time: started.elapsed().as_secs_f64(),
            }
        }
    };

    let value = serde_json::to_value(&summary)
        .map_err(|e| Error::Inconsistency(format!("summary serialization: {e}")))?;
    validate_summary(&value)?;
    std::fs::write(
        config.out_dir.join("summary.json"),
        serde_json::to_string_pretty(&value)
            .map_err(|e| Error::Inconsistency(format!("summary serialization: {e}")))?,
    )?;
    config.save(&config.out_dir.join("config.json"))?;
    Ok(summary)
}
