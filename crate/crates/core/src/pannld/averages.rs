//! Stranger-randomization averages: degree-grouped partial sums, the
//! intersection correction, and the relegated off-diagonal means.
//!
//! Gₓ = Σ_{y ∈ ℛₓ} φₙ(m_{x,y}) is assembled in three stages so the work
//! stays proportional to Σ dₓ² instead of the O(n²) relegated-pair count:
//! degree grouping gives Hₓ = Σ_{y ∈ ℛₓ} φₙ(dₓ + d_y + 2), connector sets
//! correct the pairs whose promoted neighborhoods overlap, and a final
//! sweep per promoted pair removes the witnesses that prefer v over x.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::neighbors::{DegreeGroups, NeighborGraph};
use crate::pannld::phi::PhiTable;
use crate::pannld::promoted::{PromotedFoci, RestrictedTables};

/// Every φ argument a run needs: the Λ₁ x Λ₁ sums (capped at n) plus the
/// ranges of influence of all connector pairs.
pub fn required_phi_args(
    g: &NeighborGraph,
    groups: &DegreeGroups,
    foci: &PromotedFoci,
) -> Result<BTreeSet<usize>> {
    let n = g.n();
    let mut ms = BTreeSet::new();
    for (i, &a) in groups.lambda1.iter().enumerate() {
        for &b in &groups.lambda1[i..] {
            if a + b <= n {
                ms.insert(a + b);
            }
        }
    }
    for (&(x, y), conn) in &foci.connectors {
        let m = 2 + g.degree(x) + g.degree(y) - conn.gamma();
        if m > n {
            return Err(Error::Inconsistency(format!(
                "range of influence {m} > n = {n} for pair ({x}, {y})"
            )));
        }
        ms.insert(m);
    }
    Ok(ms)
}

pub struct PartialSums {
    /// g(α) per α ∈ Λ₁.
    pub g_alpha: HashMap<usize, f64>,
    /// Hₓ = Σ_{y ∈ ℛₓ} φₙ(dₓ + d_y + 2), ignoring neighborhood overlaps.
    pub h: Vec<f64>,
    pub steps: u64,
}

/// Degree-grouped sums: g(α) = Σ_β φₙ(α+β)·#{y : d_y = β-1}, then Hₓ by
/// subtracting the promoted partners (terms with α+β > n are skipped — no
/// relegated pair can have m > n).
pub fn partial_sums(
    g: &NeighborGraph,
    groups: &DegreeGroups,
    phi: &PhiTable,
) -> Result<PartialSums> {
    let n = g.n();
    let mut steps = 0u64;
    let mut g_alpha: HashMap<usize, f64> = HashMap::with_capacity(groups.lambda1.len());
    for &alpha in &groups.lambda1 {
        let mut acc = 0.0;
        for &(beta, count) in &groups.counts {
            if alpha + beta > n {
                continue;
            }
            steps += 1;
            acc += phi.get(alpha + beta)? * count as f64;
        }
        g_alpha.insert(alpha, acc);
    }

    let mut h = vec![0.0f64; n];
    for x in 0..n {
        let dx = g.degree(x);
        if dx == n - 1 {
            // No relegated partners at all.
            continue;
        }
        let mut acc = *g_alpha.get(&(dx + 1)).ok_or_else(|| {
            Error::Inconsistency(format!("missing g(alpha) for alpha = {}", dx + 1))
        })?;
        steps += 1;
        if 2 * dx + 2 <= n {
            acc -= phi.get(2 * dx + 2)?; // the y = x term
        }
        for &y in g.promoted(x) {
            steps += 1;
            let s = dx + g.degree(y) + 2;
            if s <= n {
                acc -= phi.get(s)?;
            }
        }
        h[x] = acc;
    }
    Ok(PartialSums { g_alpha, h, steps })
}

/// Upgrade Hₓ to Gₓ: for each relegated pair with common promoted
/// neighbors, replace φₙ(α+β) by φₙ(α+β-γ) on both endpoints.
pub fn intersection_correction(
    g: &NeighborGraph,
    foci: &PromotedFoci,
    partial: &PartialSums,
    phi: &PhiTable,
) -> Result<(Vec<f64>, u64)> {
    let n = g.n();
    let k_min = g.k_min();
    let mut g_x = partial.h.clone();
    let mut steps = 0u64;
    for (&(x, y), conn) in &foci.connectors {
        steps += 1;
        let alpha = g.degree(x) + 1;
        let beta = g.degree(y) + 1;
        let gamma = conn.gamma();
        let m = alpha + beta - gamma;
        if m < k_min + 2 {
            return Err(Error::Inconsistency(format!(
                "pair ({x}, {y}): range of influence {m} below the K+2 = {} floor",
                k_min + 2
            )));
        }
        let coarse = if alpha + beta <= n {
            phi.get(alpha + beta)?
        } else {
            0.0
        };
        let delta = phi.get(m)? - coarse;
        g_x[x] += delta;
        g_x[y] += delta;
    }
    for x in 0..n {
        if g.degree(x) == n - 1 {
            g_x[x] = 0.0;
        }
    }
    Ok((g_x, steps))
}

/// G_{x,v} = Gₓ - Σ φₙ(m_{x,y}) over witnesses y ∈ 𝒫_v ∩ ℛₓ with y ≺_v x,
/// for every ordered promoted pair, by sweeping the symmetric difference of
/// the two neighborhoods.
pub fn relegated_offdiagonal(
    g: &NeighborGraph,
    rt: &RestrictedTables,
    foci: &PromotedFoci,
    g_x: &[f64],
    phi: &PhiTable,
) -> Result<(HashMap<(usize, usize), f64>, u64)> {
    let mut out: HashMap<(usize, usize), f64> = HashMap::new();
    let mut steps = 0u64;
    let mut lookups = 0u64;
    for (x, v) in g.promoted_edges() {
        let mut gxv = g_x[x];
        let mut gvx = g_x[v];
        for &y in g.promoted(v) {
            if y == x || g.is_promoted(x, y) {
                continue;
            }
            steps += 1;
            if rt.precedes(v, y, x, &mut lookups)? {
                let m = foci.range_of_influence(g, x, y);
                gxv -= phi.get(m)?;
            }
        }
        for &y in g.promoted(x) {
            if y == v || g.is_promoted(v, y) {
                continue;
            }
            steps += 1;
            if rt.precedes(x, y, v, &mut lookups)? {
                let m = foci.range_of_influence(g, v, y);
                gvx -= phi.get(m)?;
            }
        }
        out.insert((x, v), gxv);
        out.insert((v, x), gvx);
    }
    Ok((out, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbors::{build_friend_sets, degree_groups, KSpec, NeighborGraph};
    use crate::pannld::phi::{PhiMode, PhiTable};
    use crate::pannld::promoted::{algorithm_one, RestrictedTables};
    use crate::ranking::gen_euclidean;

    struct Fixture {
        g: NeighborGraph,
        rt: RestrictedTables,
        foci: crate::pannld::promoted::PromotedFoci,
        phi: PhiTable,
        groups: DegreeGroups,
    }

    fn fixture(n: usize, k: usize, seed: u64) -> Fixture {
        let rs = gen_euclidean(n, 2, seed).unwrap();
        let friends = build_friend_sets(&rs, &KSpec::Uniform(k)).unwrap();
        let g = NeighborGraph::from_friend_sets(friends).unwrap();
        let rt = RestrictedTables::build(&rs, &g).unwrap();
        let foci = algorithm_one(&g, &rt).unwrap();
        let groups = degree_groups(&g);
        let ms = required_phi_args(&g, &groups, &foci).unwrap();
        let phi = PhiTable::build(n, PhiMode::Exact, &ms).unwrap();
        Fixture {
            g,
            rt,
            foci,
            phi,
            groups,
        }
    }

    /// Direct O(n²) evaluation of Hₓ.
    fn h_brute(g: &NeighborGraph, phi: &PhiTable) -> Vec<f64> {
        let n = g.n();
        (0..n)
            .map(|x| {
                let mut acc = 0.0;
                for y in 0..n {
                    if y == x || g.is_promoted(x, y) {
                        continue;
                    }
                    let s = g.degree(x) + g.degree(y) + 2;
                    if s <= n {
                        acc += phi.get(s).unwrap();
                    }
                }
                acc
            })
            .collect()
    }

    /// Direct O(n²) evaluation of Gₓ from ranges of influence.
    fn g_brute(
        g: &NeighborGraph,
        foci: &crate::pannld::promoted::PromotedFoci,
        phi: &PhiTable,
    ) -> Vec<f64> {
        let n = g.n();
        (0..n)
            .map(|x| {
                let mut acc = 0.0;
                for y in 0..n {
                    if y == x || g.is_promoted(x, y) {
                        continue;
                    }
                    acc += phi.get(foci.range_of_influence(g, x, y)).unwrap();
                }
                acc
            })
            .collect()
    }

    #[test]
    fn partial_sums_match_brute_force() {
        for seed in [1u64, 5, 9] {
            let f = fixture(40, 5, seed);
            let partial = partial_sums(&f.g, &f.groups, &f.phi).unwrap();
            let brute = h_brute(&f.g, &f.phi);
            for x in 0..40 {
                assert!(
                    (partial.h[x] - brute[x]).abs() < 1e-12,
                    "seed {seed}, H[{x}]: {} vs {}",
                    partial.h[x],
                    brute[x]
                );
            }
        }
    }

    #[test]
    fn intersection_correction_matches_brute_force() {
        for seed in [2u64, 7, 13] {
            let f = fixture(50, 6, seed);
            let partial = partial_sums(&f.g, &f.groups, &f.phi).unwrap();
            let (gx, steps) = intersection_correction(&f.g, &f.foci, &partial, &f.phi).unwrap();
            let brute = g_brute(&f.g, &f.foci, &f.phi);
            for x in 0..50 {
                assert!(
                    (gx[x] - brute[x]).abs() < 1e-12,
                    "seed {seed}, G[{x}]: {} vs {}",
                    gx[x],
                    brute[x]
                );
            }
            assert!(steps <= f.g.degree_square_sum());
        }
    }

    #[test]
    fn correction_deltas_are_nonnegative() {
        let f = fixture(40, 5, 3);
        for (&(x, y), conn) in &f.foci.connectors {
            let s = f.g.degree(x) + f.g.degree(y) + 2;
            let coarse = if s <= 40 { f.phi.get(s).unwrap() } else { 0.0 };
            let fine = f.phi.get(s - conn.gamma()).unwrap();
            assert!(fine >= coarse, "pair ({x},{y})");
        }
    }

    #[test]
    fn range_of_influence_respects_floor() {
        // m >= K + 2 for every relegated pair touched.
        for (n, k, seed) in [(30usize, 4usize, 1u64), (20, 9, 2), (50, 6, 3)] {
            let rs = gen_euclidean(n, 2, seed).unwrap();
            let friends =
                crate::neighbors::build_friend_sets(&rs, &KSpec::Uniform(k)).unwrap();
            let g = NeighborGraph::from_friend_sets(friends).unwrap();
            let rt = RestrictedTables::build(&rs, &g).unwrap();
            let foci = algorithm_one(&g, &rt).unwrap();
            for x in 0..n {
                for y in (x + 1)..n {
                    if !g.is_promoted(x, y) {
                        let m = foci.range_of_influence(&g, x, y);
                        assert!(m >= k + 2, "pair ({x},{y}): m = {m} < K+2");
                        assert!(m <= n);
                    }
                }
            }
        }
    }

    #[test]
    fn disjoint_cliques_need_no_correction() {
        // Six tight clusters of five points, K = 4: the promoted graph is a
        // disjoint union of complete graphs, so no relegated pair shares a
        // promoted neighbor and G = H exactly, with every vertex degree 4.
        let mut points = Vec::new();
        for c in 0..6 {
            for i in 0..5 {
                points.push(vec![10.0 * c as f64 + 0.1 * i as f64, 0.2 * i as f64]);
            }
        }
        let rs = crate::ranking::RankingSystem::from_points(&points).unwrap();
        let friends = crate::neighbors::build_friend_sets(&rs, &KSpec::Uniform(4)).unwrap();
        let g = NeighborGraph::from_friend_sets(friends).unwrap();
        for x in 0..30 {
            assert_eq!(g.degree(x), 4);
        }
        let rt = RestrictedTables::build(&rs, &g).unwrap();
        let foci = algorithm_one(&g, &rt).unwrap();
        assert!(foci.connectors.is_empty());
        let groups = degree_groups(&g);
        let ms = required_phi_args(&g, &groups, &foci).unwrap();
        let phi = PhiTable::build(30, PhiMode::Exact, &ms).unwrap();
        let partial = partial_sums(&g, &groups, &phi).unwrap();
        let (gx, steps) = intersection_correction(&g, &foci, &partial, &phi).unwrap();
        assert_eq!(steps, 0);
        assert_eq!(gx, partial.h);
    }

    #[test]
    fn dense_instance_exercises_skipped_terms() {
        // With K = 9 at n = 20 most degree sums exceed n, so the grouped
        // sums must skip those terms and the connector corrections must
        // supply everything; the G values still match brute force.
        let f = fixture(20, 9, 4);
        let mut skipped = 0usize;
        for x in 0..20 {
            for y in 0..20 {
                if x != y && f.g.degree(x) + f.g.degree(y) + 2 > 20 {
                    skipped += 1;
                }
            }
        }
        assert!(skipped > 0, "instance does not exercise the skip path");
        let partial = partial_sums(&f.g, &f.groups, &f.phi).unwrap();
        let (gx, _) = intersection_correction(&f.g, &f.foci, &partial, &f.phi).unwrap();
        let brute = g_brute(&f.g, &f.foci, &f.phi);
        for x in 0..20 {
            assert!((gx[x] - brute[x]).abs() < 1e-12, "G[{x}]");
        }
    }

    #[test]
    fn offdiagonal_matches_brute_force() {
        for seed in [4u64, 8] {
            let f = fixture(45, 5, seed);
            let partial = partial_sums(&f.g, &f.groups, &f.phi).unwrap();
            let (gx, _) = intersection_correction(&f.g, &f.foci, &partial, &f.phi).unwrap();
            let (gxv, steps) =
                relegated_offdiagonal(&f.g, &f.rt, &f.foci, &gx, &f.phi).unwrap();
            // Brute force straight from the defining sum.
            let full = gen_euclidean(45, 2, seed).unwrap().full_tables().unwrap();
            for (&(x, v), &got) in &gxv {
                let mut want = gx[x];
                for y in 0..45 {
                    if y == x || y == v || g_is_releg(&f.g, x, y) != true {
                        continue;
                    }
                    if f.g.is_promoted(v, y) && full.precedes(v, y, x) {
                        want -= f.phi.get(f.foci.range_of_influence(&f.g, x, y)).unwrap();
                    }
                }
                assert!(
                    (got - want).abs() < 1e-12,
                    "seed {seed}, G[{x},{v}]: {got} vs {want}"
                );
                assert!(got <= gx[x] + 1e-12);
            }
            assert!(steps <= f.g.degree_square_sum());
        }
    }

    fn g_is_releg(g: &NeighborGraph, x: usize, y: usize) -> bool {
        x != y && !g.is_promoted(x, y)
    }
}
