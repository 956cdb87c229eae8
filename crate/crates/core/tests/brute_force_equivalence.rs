//! Algorithm-level equivalence checks: the graph traversal must reproduce,
//! exactly, a naive triple-loop evaluation of the promoted foci and
//! connector sets done straight from the definitions on full rank tables.

use std::collections::BTreeMap;

use pannld_core::neighbors::{build_friend_sets, KSpec, NeighborGraph};
use pannld_core::pannld::{run_pannld, PannldParams};
use pannld_core::pald;
use pannld_core::ranking::table::FullRankTables;
use pannld_core::ranking::{gen_euclidean, gen_random_tournament, RankingSystem};

/// Naive U^P_{x||y} from the definition, via full rank tables.
fn brute_left_focus(
    tables: &FullRankTables,
    g: &NeighborGraph,
    x: usize,
    y: usize,
) -> Vec<usize> {
    let mut members = vec![x];
    for &z in g.promoted(x) {
        if z == y {
            continue;
        }
        if !tables.precedes(x, z, y) {
            continue;
        }
        if g.is_promoted(y, z) {
            if tables.precedes(z, x, y) {
                members.push(z);
            }
        } else {
            members.push(z);
        }
    }
    members.sort_unstable();
    members
}

/// Naive connector sets D^R_{y||z} over all relegated pairs with common
/// promoted neighbors.
fn brute_connectors(
    tables: &FullRankTables,
    g: &NeighborGraph,
) -> BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> {
    let n = g.n();
    let mut out = BTreeMap::new();
    for y in 0..n {
        for z in (y + 1)..n {
            if g.is_promoted(y, z) {
                continue;
            }
            let mut fwd = Vec::new();
            let mut rev = Vec::new();
            for &x in g.promoted(y) {
                if g.promoted(z).binary_search(&x).is_err() {
                    continue;
                }
                if tables.precedes(x, y, z) {
                    fwd.push(x);
                } else {
                    rev.push(x);
                }
            }
            if !fwd.is_empty() || !rev.is_empty() {
                out.insert((y, z), (fwd, rev));
            }
        }
    }
    out
}

fn check_instance(rs: &RankingSystem, k: usize) {
    let n = rs.n();
    let out = run_pannld(rs, &PannldParams::new(k)).unwrap();
    let tables = rs.full_tables().unwrap();
    let g = &out.graph;

    // Left foci: exact set equality for every ordered promoted pair.
    for x in 0..n {
        for &y in g.promoted(x) {
            let brute = brute_left_focus(&tables, g, x, y);
            let got = out.foci.left_members(g, x, y).unwrap();
            assert_eq!(got, brute.as_slice(), "left focus ({x}, {y})");
        }
    }

    // Connector sets: exact equality including sidedness.
    let brute = brute_connectors(&tables, g);
    assert_eq!(out.foci.connectors.len(), brute.len(), "connector pair count");
    for ((pair, conn), (bpair, (bfwd, brev))) in
        out.foci.connectors.iter().zip(brute.iter())
    {
        assert_eq!(pair, bpair);
        assert_eq!(&conn.fwd, bfwd, "fwd connectors of {pair:?}");
        assert_eq!(&conn.rev, brev, "rev connectors of {pair:?}");
    }

    // Promoted cohesion entries against a from-scratch accumulation.
    let norm = 1.0 / (n as f64 - 1.0);
    for x in 0..n {
        let mut diag = 0.0;
        for &y in g.promoted(x) {
            let size = brute_left_focus(&tables, g, x, y).len()
                + brute_left_focus(&tables, g, y, x).len();
            diag += norm / size as f64;
        }
        let got = out.promoted_cohesion.get(x, x).unwrap();
        assert_eq!(got, diag, "diagonal {x}");
        for &v in g.promoted(x) {
            let mut entry = 0.0;
            for &y in g.promoted(x) {
                let left = brute_left_focus(&tables, g, x, y);
                if left.binary_search(&v).is_ok() {
                    let size = left.len() + brute_left_focus(&tables, g, y, x).len();
                    entry += norm / size as f64;
                }
            }
            let got = out.promoted_cohesion.get(x, v).unwrap();
            assert!(
                (got - entry).abs() < 1e-15,
                "entry ({x}, {v}): {got} vs {entry}"
            );
        }
    }
}

#[test]
fn traversal_matches_brute_force_across_seeds() {
    // 20 seeded instances spanning n in [10, 60], K in [3, 8].
    for seed in 0u64..20 {
        let n = 10 + (seed as usize * 50) / 19;
        let k = 3 + (seed as usize) % 6;
        let k = k.min(n - 2);
        let rs = gen_euclidean(n, 2, seed).unwrap();
        check_instance(&rs, k);
    }
}

#[test]
fn traversal_matches_brute_force_on_tournaments() {
    for seed in [1u64, 2, 3] {
        let rs = gen_random_tournament(24, seed).unwrap();
        check_instance(&rs, 5);
    }
}

/// A ranking system with no relegated pairs at all: point i ranks the others
/// cyclically (i+1, i+2, ...), so no two points are mutually last and
/// K = n-2 promotes every pair.
fn cyclic_system(n: usize) -> RankingSystem {
    let mut rank = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rank[i * n + j] = ((j + n - i) % n) as u32;
            }
        }
    }
    RankingSystem::from_rank_matrix(n, rank).unwrap()
}

#[test]
fn all_promoted_degenerates_to_exact_pald() {
    for n in [8usize, 12, 20] {
        let rs = cyclic_system(n);
        let friends = build_friend_sets(&rs, &KSpec::Uniform(n - 2)).unwrap();
        let g = NeighborGraph::from_friend_sets(friends).unwrap();
        assert_eq!(g.edge_count(), n * (n - 1) / 2, "n = {n}: some pair relegated");

        let out = run_pannld(&rs, &PannldParams::new(n - 2)).unwrap();
        assert_eq!(out.tau_r, 0.0, "no relegated pairs, tau_R must vanish");

        let tables = rs.full_tables().unwrap();
        let exact = pald::cohesion_matrix_exact(&tables).unwrap();
        for x in 0..n {
            let approx = out.cohesion.get(x, x).unwrap();
            let reference = exact.cohesion.get(x, x);
            assert!(
                (approx - reference).abs() <= 1e-12,
                "diag {x}: {approx} vs {reference}"
            );
            for &v in out.graph.promoted(x) {
                let approx = out.cohesion.get(x, v).unwrap();
                let reference = exact.cohesion.get(x, v);
                assert!(
                    (approx - reference).abs() <= 1e-12,
                    "({x}, {v}): {approx} vs {reference}"
                );
            }
        }
        assert!((out.tau - exact.tau).abs() <= 1e-12);
    }
}

#[test]
fn budgets_asserted_over_a_spread_of_shapes() {
    // run_pannld hard-asserts the traversal comparison and step budgets;
    // exercise it across densities.
    for (n, k, seed) in [(30usize, 3usize, 0u64), (40, 10, 1), (60, 8, 2), (25, 20, 3)] {
        let rs = gen_euclidean(n, 3, seed).unwrap();
        let out = run_pannld(&rs, &PannldParams::new(k)).unwrap();
        assert!(out.diagnostics.comparisons() as f64 <= out.diagnostics.comparison_budget);
    }
}
