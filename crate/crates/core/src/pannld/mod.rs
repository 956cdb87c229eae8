//! The scalable pipeline: promoted cohesion by graph traversal, stranger
//! averages through φₙ, sparse assembly, threshold, and clustering.

pub mod averages;
pub mod phi;
pub mod promoted;

use std::collections::HashMap;

use serde::Serialize;

use crate::cluster::{components, ClusterResult};
use crate::error::{Error, Result};
use crate::neighbors::{
    build_friend_sets, degree_groups, DegreeGroups, KSpec, NeighborGraph,
};
use crate::ranking::RankingSystem;
use averages::{
    intersection_correction, partial_sums, relegated_offdiagonal, required_phi_args,
};
use phi::{PhiMode, PhiTable};
use promoted::{algorithm_one, PromotedFoci, RestrictedTables};

/// Cohesion defined only on promoted pairs and the diagonal.
#[derive(Debug, Clone)]
pub struct SparseCohesion {
    n: usize,
    diag: Vec<f64>,
    entries: HashMap<(usize, usize), f64>,
}

impl SparseCohesion {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry C_{x,v}; asking outside 𝒫 ∪ diagonal is a domain error.
    pub fn get(&self, x: usize, v: usize) -> Result<f64> {
        if x == v {
            if x >= self.n {
                return Err(Error::InvalidInput(format!("point {x} out of range")));
            }
            return Ok(self.diag[x]);
        }
        self.entries.get(&(x, v)).copied().ok_or_else(|| {
            Error::InvalidInput(format!(
                "cohesion is undefined at ({x}, {v}): pair is not promoted"
            ))
        })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// min{C_{x,y}, C_{y,x}} for a promoted pair.
    pub fn mutual_weight(&self, x: usize, y: usize) -> Result<f64> {
        Ok(self.get(x, y)?.min(self.get(y, x)?))
    }

    /// Off-diagonal entries sorted by key, for deterministic export.
    pub fn sorted_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut all: Vec<(usize, usize, f64)> = self
            .entries
            .iter()
            .map(|(&(x, v), &c)| (x, v, c))
            .collect();
        all.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        all
    }
}

/// C^𝒫 from the traversal output: entries over 𝒫 ∪ diagonal, accumulated
/// in ascending (x, y) order.
pub fn assemble_promoted_cohesion(g: &NeighborGraph, foci: &PromotedFoci) -> Result<SparseCohesion> {
    let n = g.n();
    let norm = 1.0 / (n as f64 - 1.0);
    let mut diag = vec![0.0f64; n];
    let mut entries: HashMap<(usize, usize), f64> = HashMap::new();
    for x in 0..n {
        for &v in g.promoted(x) {
            entries.insert((x, v), 0.0);
        }
    }
    for x in 0..n {
        for &y in g.promoted(x) {
            let w = norm / foci.pair_size(g, x, y)? as f64;
            for &v in foci.left_members(g, x, y)? {
                if v == x {
                    diag[x] += w;
                } else {
                    *entries.get_mut(&(x, v)).ok_or_else(|| {
                        Error::Inconsistency(format!(
                            "focus member {v} of ({x}, {y}) is outside the promoted adjacency"
                        ))
                    })? += w;
                }
            }
        }
    }
    Ok(SparseCohesion { n, diag, entries })
}

/// C^F = C^𝒫 + averaged relegated part: Gₓ/(n-1) on the diagonal and
/// G_{x,v}/(n-1) on promoted pairs.
pub fn assemble(
    promoted_cohesion: &SparseCohesion,
    g_x: &[f64],
    g_xv: &HashMap<(usize, usize), f64>,
    n: usize,
) -> SparseCohesion {
    let norm = 1.0 / (n as f64 - 1.0);
    let mut out = promoted_cohesion.clone();
    for x in 0..n {
        out.diag[x] += g_x[x] * norm;
    }
    for (key, c) in out.entries.iter_mut() {
        if let Some(gv) = g_xv.get(key) {
            *c += gv * norm;
        }
    }
    out
}

/// τ = τ_𝒫 + τ_ℛ per the threshold decomposition.
pub fn pannld_threshold(
    g: &NeighborGraph,
    foci: &PromotedFoci,
    g_x: &[f64],
) -> Result<(f64, f64, f64)> {
    let n = g.n() as f64;
    let mut tau_p = 0.0;
    for (x, y) in g.promoted_edges() {
        tau_p += 1.0 / foci.pair_size(g, x, y)? as f64;
    }
    tau_p /= n * (n - 1.0);
    let tau_r = g_x.iter().sum::<f64>() / (2.0 * n * (n - 1.0));
    Ok((tau_p + tau_r, tau_p, tau_r))
}

/// Keep promoted edges whose mutual C^F reaches τ; label components.
pub fn pannld_cluster(
    g: &NeighborGraph,
    cohesion: &SparseCohesion,
    tau: f64,
) -> Result<ClusterResult> {
    let mut edges = Vec::new();
    for (x, y) in g.promoted_edges() {
        let w = cohesion.mutual_weight(x, y)?;
        if w >= tau {
            edges.push((x, y, w));
        }
    }
    let (labels, component_sizes) = components(g.n(), &edges);
    Ok(ClusterResult {
        threshold: tau,
        edges,
        labels,
        component_sizes,
        oracle_calls: 0,
        inner_steps: 0,
    })
}

#[derive(Debug, Clone)]
pub struct PannldParams {
    pub k: KSpec,
    pub phi_mode: PhiMode,
    /// Per-vertex promoted-degree cap; `None` picks a default that aborts
    /// hub-dominated instances instead of running a quadratic inner loop.
    pub degree_cap: Option<usize>,
}

impl PannldParams {
    pub fn new(k: usize) -> Self {
        Self {
            k: KSpec::Uniform(k),
            phi_mode: PhiMode::Exact,
            degree_cap: None,
        }
    }
}

/// Counters and their bounds, asserted on every run.
#[derive(Debug, Clone, Serialize)]
pub struct PannldDiagnostics {
    pub knn_oracle_calls: u64,
    pub sort_oracle_calls: u64,
    pub traversal_comparisons: u64,
    pub traversal_steps: u64,
    pub partial_steps: u64,
    pub intersection_steps: u64,
    pub offdiagonal_steps: u64,
    pub phi_values: usize,
    pub comparison_budget: f64,
    pub step_budget: f64,
    pub degree_square_sum: u64,
}

impl PannldDiagnostics {
    /// Comparisons attributed to the traversal phase: restricted-table
    /// sorting plus rank lookups.
    pub fn comparisons(&self) -> u64 {
        self.sort_oracle_calls + self.traversal_comparisons
    }

    /// Post-traversal work units, all bounded by Σ dₓ² terms.
    pub fn total_steps(&self) -> u64 {
        self.traversal_steps + self.partial_steps + self.intersection_steps
            + self.offdiagonal_steps
    }
}

pub struct PannldOutput {
    pub graph: NeighborGraph,
    pub groups: DegreeGroups,
    pub restricted: RestrictedTables,
    pub foci: PromotedFoci,
    pub promoted_cohesion: SparseCohesion,
    pub cohesion: SparseCohesion,
    pub g_x: Vec<f64>,
    pub g_xv: HashMap<(usize, usize), f64>,
    pub h: Vec<f64>,
    pub phi: PhiTable,
    pub tau: f64,
    pub tau_p: f64,
    pub tau_r: f64,
    pub cluster: ClusterResult,
    pub diagnostics: PannldDiagnostics,
}

/// The full pipeline: friend sets, promoted graph, traversal, averages,
/// assembly, threshold, components.
pub fn run_pannld(rs: &RankingSystem, params: &PannldParams) -> Result<PannldOutput> {
    let n = rs.n();
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    let oracle_before = rs.oracle().calls();
    let friends = build_friend_sets(rs, &params.k)?;
    let knn_oracle_calls = rs.oracle().calls() - oracle_before;
    let graph = NeighborGraph::from_friend_sets(friends)?;
    let cap = params.degree_cap.unwrap_or_else(|| graph.default_degree_cap());
    graph.check_degree_cap(cap)?;
    run_pannld_on_graph(rs, graph, params.phi_mode, knn_oracle_calls)
}

/// Rest of the pipeline once a (possibly externally validated) neighbor
/// graph exists. The degree cap is the caller's concern here.
pub fn run_pannld_on_graph(
    rs: &RankingSystem,
    graph: NeighborGraph,
    phi_mode: PhiMode,
    knn_oracle_calls: u64,
) -> Result<PannldOutput> {
    let n = rs.n();
    let rt = RestrictedTables::build(rs, &graph)?;
    let foci = algorithm_one(&graph, &rt)?;
    let groups = degree_groups(&graph);
    let ms = required_phi_args(&graph, &groups, &foci)?;
    let phi = PhiTable::build(n, phi_mode, &ms)?;
    let partial = partial_sums(&graph, &groups, &phi)?;
    let (g_x, intersection_steps) = intersection_correction(&graph, &foci, &partial, &phi)?;
    let (g_xv, offdiagonal_steps) = relegated_offdiagonal(&graph, &rt, &foci, &g_x, &phi)?;

    let promoted_cohesion = assemble_promoted_cohesion(&graph, &foci)?;
    let cohesion = assemble(&promoted_cohesion, &g_x, &g_xv, n);
    let (tau, tau_p, tau_r) = pannld_threshold(&graph, &foci, &g_x)?;

    // The threshold decomposition must reproduce half the mean diagonal.
    let tau_diag = cohesion.diagonal().iter().sum::<f64>() / (2.0 * n as f64);
    assert!(
        (tau - tau_diag).abs() <= 1e-12,
        "threshold identity violated: {tau} vs {tau_diag}"
    );

    let d2 = graph.degree_square_sum();
    let comparison_budget: f64 = (0..n)
        .map(|x| {
            let d = graph.degree(x) as f64;
            d * d.log2() + 3.0 * d * (d - 1.0) / 2.0
        })
        .sum();
    let diagnostics = PannldDiagnostics {
        knn_oracle_calls,
        sort_oracle_calls: rt.sort_oracle_calls,
        traversal_comparisons: foci.comparisons,
        traversal_steps: foci.inner_steps,
        partial_steps: partial.steps,
        intersection_steps,
        offdiagonal_steps,
        phi_values: phi.len(),
        comparison_budget,
        step_budget: 1.5 * d2 as f64,
        degree_square_sum: d2,
    };
    assert!(
        (diagnostics.comparisons() as f64) <= comparison_budget,
        "comparison budget exceeded: {} > {comparison_budget}",
        diagnostics.comparisons()
    );
    assert!(
        (diagnostics.traversal_steps as f64) <= 1.5 * d2 as f64,
        "traversal step budget exceeded: {} > {}",
        diagnostics.traversal_steps,
        1.5 * d2 as f64
    );
    assert!(
        diagnostics.intersection_steps <= d2,
        "intersection step budget exceeded"
    );
    assert!(
        diagnostics.offdiagonal_steps <= d2,
        "off-diagonal step budget exceeded"
    );

    let mut cluster = pannld_cluster(&graph, &cohesion, tau)?;
    cluster.oracle_calls = knn_oracle_calls + diagnostics.comparisons();
    cluster.inner_steps = diagnostics.total_steps();

    Ok(PannldOutput {
        graph,
        groups,
        restricted: rt,
        foci,
        promoted_cohesion,
        cohesion,
        g_x,
        g_xv,
        h: partial.h,
        phi,
        tau,
        tau_p,
        tau_r,
        cluster,
        diagnostics,
    })
}
