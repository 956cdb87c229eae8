//! Restricted rank tables and the promoted-cohesion traversal.
//!
//! One vertex sweep over `(S, 𝒫)` fills every left promoted focus
//! `U^𝒫_{x‖y}` and every connector set `D^ℛ_{y‖z}`. For each outer vertex x
//! and unordered pair {y, z} ⊂ 𝒫ₓ there are two branches:
//!
//! - {y, z} relegated: one comparison decides; the loser's side records x as
//!   a connector and the winner lands in the loser's left focus
//!   ("promoted beats relegated").
//! - {y, z} promoted: the three edges form a triangle and x is placed by the
//!   triangle rule, at most two rank lookups.
//!
//! Placements of y and z themselves happen when their own turn as outer
//! vertex comes along, so every (pair, member) is produced exactly once and
//! merging per-task results is plain concatenation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::neighbors::NeighborGraph;
use crate::ranking::table::sort_by_base_order;
use crate::ranking::RankingSystem;

/// Each 𝒫ₓ sorted by `≺ₓ`, with O(log d) rank lookup by id.
pub struct RestrictedTables {
    order: Vec<Vec<usize>>,
    by_id: Vec<Vec<(usize, u32)>>,
    /// Oracle calls spent sorting all the 𝒫ₓ.
    pub sort_oracle_calls: u64,
}

impl RestrictedTables {
    pub fn build(rs: &RankingSystem, g: &NeighborGraph) -> Result<Self> {
        let oracle = rs.oracle();
        let before = oracle.calls();
        let order: Vec<Vec<usize>> = (0..g.n())
            .into_par_iter()
            .map(|x| {
                let mut members = g.promoted(x).to_vec();
                sort_by_base_order(oracle, x, &mut members)?;
                Ok(members)
            })
            .collect::<Result<_>>()?;
        let by_id: Vec<Vec<(usize, u32)>> = order
            .par_iter()
            .map(|members| {
                let mut pairs: Vec<(usize, u32)> = members
                    .iter()
                    .enumerate()
                    .map(|(r, &y)| (y, r as u32 + 1))
                    .collect();
                pairs.sort_unstable();
                pairs
            })
            .collect();
        Ok(Self {
            order,
            by_id,
            sort_oracle_calls: oracle.calls() - before,
        })
    }

    /// 𝒫ₓ in rank order.
    pub fn order(&self, x: usize) -> &[usize] {
        &self.order[x]
    }

    #[inline]
    fn rank(&self, x: usize, y: usize) -> Result<u32> {
        let row = &self.by_id[x];
        match row.binary_search_by_key(&y, |&(id, _)| id) {
            Ok(i) => Ok(row[i].1),
            Err(_) => Err(Error::Inconsistency(format!(
                "rank table at {x} is missing promoted member {y}"
            ))),
        }
    }

    /// `y ≺ₓ z` for y, z ∈ 𝒫ₓ; one counted triplet comparison.
    #[inline]
    pub fn precedes(&self, x: usize, y: usize, z: usize, lookups: &mut u64) -> Result<bool> {
        *lookups += 1;
        Ok(self.rank(x, y)? < self.rank(x, z)?)
    }
}

/// Connector sets for one relegated pair {lo, hi} (lo < hi):
/// `fwd = D^ℛ_{lo‖hi}`, `rev = D^ℛ_{hi‖lo}`; their disjoint union is
/// 𝒫_lo ∩ 𝒫_hi.
#[derive(Debug, Clone, Default)]
pub struct Connector {
    pub fwd: Vec<usize>,
    pub rev: Vec<usize>,
}

impl Connector {
    pub fn gamma(&self) -> usize {
        self.fwd.len() + self.rev.len()
    }
}

/// Left promoted foci and connector sets produced by the traversal.
pub struct PromotedFoci {
    offsets: Vec<usize>,
    /// Members of `U^𝒫_{x‖y}` per ordered promoted pair, sorted by id.
    left: Vec<Vec<usize>>,
    /// Non-empty connector sets, keyed by the canonical relegated pair.
    pub connectors: BTreeMap<(usize, usize), Connector>,
    /// Rank-table lookups made by the traversal.
    pub comparisons: u64,
    /// Inner-loop work units: 1 per relegated pair visit, 3 per triangle.
    pub inner_steps: u64,
}

impl PromotedFoci {
    fn pair_index(&self, g: &NeighborGraph, x: usize, y: usize) -> Result<usize> {
        match g.promoted(x).binary_search(&y) {
            Ok(i) => Ok(self.offsets[x] + i),
            Err(_) => Err(Error::InvalidInput(format!(
                "pair ({x}, {y}) is not promoted"
            ))),
        }
    }

    /// Members of `U^𝒫_{x‖y}` (always contains x).
    pub fn left_members(&self, g: &NeighborGraph, x: usize, y: usize) -> Result<&[usize]> {
        Ok(&self.left[self.pair_index(g, x, y)?])
    }

    pub fn left_size(&self, g: &NeighborGraph, x: usize, y: usize) -> Result<usize> {
        Ok(self.left_members(g, x, y)?.len())
    }

    /// |U^𝒫_{x,y}| = |U^𝒫_{x‖y}| + |U^𝒫_{y‖x}|.
    pub fn pair_size(&self, g: &NeighborGraph, x: usize, y: usize) -> Result<usize> {
        Ok(self.left_size(g, x, y)? + self.left_size(g, y, x)?)
    }

    /// |𝒫ₓ ∩ 𝒫_y| for a relegated pair, via its connector sets.
    pub fn gamma(&self, x: usize, y: usize) -> usize {
        self.connectors
            .get(&(x.min(y), x.max(y)))
            .map_or(0, Connector::gamma)
    }

    /// Range of influence m_{x,y} = 2 + dₓ + d_y - |𝒫ₓ ∩ 𝒫_y| for a
    /// relegated pair.
    pub fn range_of_influence(&self, g: &NeighborGraph, x: usize, y: usize) -> usize {
        2 + g.degree(x) + g.degree(y) - self.gamma(x, y)
    }
}

struct Local {
    placements: Vec<(usize, usize)>,
    connectors: Vec<((usize, usize), usize, bool)>,
    comparisons: u64,
    inner_steps: u64,
}

impl Local {
    fn new() -> Self {
        Self {
            placements: Vec::new(),
            connectors: Vec::new(),
            comparisons: 0,
            inner_steps: 0,
        }
    }
}

/// Run the vertex traversal and assemble left foci plus connector sets.
pub fn algorithm_one(g: &NeighborGraph, rt: &RestrictedTables) -> Result<PromotedFoci> {
    let n = g.n();
    let mut offsets = vec![0usize; n + 1];
    for x in 0..n {
        offsets[x + 1] = offsets[x] + g.degree(x);
    }

    let locals: Vec<Local> = (0..n)
        .into_par_iter()
        .map(|x| -> Result<Local> {
            let mut local = Local::new();
            let adj = g.promoted(x);
            let d = adj.len();
            for i in 0..d {
                for j in (i + 1)..d {
                    let (y, z) = (adj[i], adj[j]);
                    let pair_of = |a: usize, b: usize| -> Result<usize> {
                        match g.promoted(a).binary_search(&b) {
                            Ok(p) => Ok(offsets[a] + p),
                            Err(_) => Err(Error::Inconsistency(format!(
                                "expected promoted pair ({a}, {b})"
                            ))),
                        }
                    };
                    if g.is_promoted(y, z) {
                        // Triangle: decide x's placement.
                        local.inner_steps += 3;
                        if rt.precedes(x, y, z, &mut local.comparisons)? {
                            if rt.precedes(y, x, z, &mut local.comparisons)? {
                                local.placements.push((pair_of(y, z)?, x));
                            }
                        } else if rt.precedes(z, x, y, &mut local.comparisons)? {
                            local.placements.push((pair_of(z, y)?, x));
                        }
                    } else {
                        // Promoted beats relegated.
                        local.inner_steps += 1;
                        if rt.precedes(x, y, z, &mut local.comparisons)? {
                            local.connectors.push(((y, z), x, true));
                            local.placements.push((pair_of(x, z)?, y));
                        } else {
                            local.connectors.push(((y, z), x, false));
                            local.placements.push((pair_of(x, y)?, z));
                        }
                    }
                }
            }
            Ok(local)
        })
        .collect::<Result<_>>()?;

    let mut left: Vec<Vec<usize>> = Vec::with_capacity(offsets[n]);
    for x in 0..n {
        for _ in 0..g.degree(x) {
            left.push(vec![x]);
        }
    }
    let mut connectors: BTreeMap<(usize, usize), Connector> = BTreeMap::new();
    let mut comparisons = 0u64;
    let mut inner_steps = 0u64;
    for local in locals {
        comparisons += local.comparisons;
        inner_steps += local.inner_steps;
        for (idx, member) in local.placements {
            left[idx].push(member);
        }
        for ((a, b), who, a_first) in local.connectors {
            // Keys arrive with a < b because adjacency lists are sorted.
            let entry = connectors.entry((a, b)).or_default();
            if a_first {
                entry.fwd.push(who);
            } else {
                entry.rev.push(who);
            }
        }
    }
    left.par_iter_mut().for_each(|m| m.sort_unstable());
    connectors.values_mut().for_each(|c| {
        c.fwd.sort_unstable();
        c.rev.sort_unstable();
    });

    Ok(PromotedFoci {
        offsets,
        left,
        connectors,
        comparisons,
        inner_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbors::{build_friend_sets, KSpec, NeighborGraph};
    use crate::ranking::gen_euclidean;

    fn setup(n: usize, k: usize, seed: u64) -> (crate::ranking::RankingSystem, NeighborGraph) {
        let rs = gen_euclidean(n, 2, seed).unwrap();
        let friends = build_friend_sets(&rs, &KSpec::Uniform(k)).unwrap();
        let g = NeighborGraph::from_friend_sets(friends).unwrap();
        (rs, g)
    }

    #[test]
    fn restricted_tables_agree_with_oracle() {
        let (rs, g) = setup(25, 4, 7);
        let rt = RestrictedTables::build(&rs, &g).unwrap();
        let full = rs.full_tables().unwrap();
        for x in 0..25 {
            let members = rt.order(x);
            for w in members.windows(2) {
                assert!(full.precedes(x, w[0], w[1]));
            }
        }
    }

    #[test]
    fn restricted_sort_within_budget() {
        let (rs, g) = setup(40, 5, 3);
        let rt = RestrictedTables::build(&rs, &g).unwrap();
        let budget: f64 = (0..40)
            .map(|x| {
                let d = g.degree(x) as f64;
                d * d.log2()
            })
            .sum();
        assert!(
            (rt.sort_oracle_calls as f64) <= budget,
            "sort calls {} > budget {budget}",
            rt.sort_oracle_calls
        );
    }

    #[test]
    fn missing_member_is_consistency_error() {
        let (rs, g) = setup(12, 3, 1);
        let rt = RestrictedTables::build(&rs, &g).unwrap();
        // Find a relegated pair and ask for its rank.
        let mut lookups = 0u64;
        'outer: for x in 0..12 {
            for y in 0..12 {
                if x != y && !g.is_promoted(x, y) {
                    let err = rt.precedes(x, y, g.promoted(x)[0], &mut lookups);
                    assert!(matches!(err, Err(Error::Inconsistency(_))));
                    break 'outer;
                }
            }
        }
    }

    #[test]
    fn left_foci_contain_base_and_stay_in_domain() {
        let (rs, g) = setup(30, 4, 11);
        let rt = RestrictedTables::build(&rs, &g).unwrap();
        let foci = algorithm_one(&g, &rt).unwrap();
        for x in 0..30 {
            for &y in g.promoted(x) {
                let members = foci.left_members(&g, x, y).unwrap();
                assert!(members.contains(&x));
                assert!(!members.contains(&y));
                for &v in members {
                    assert!(v == x || g.is_promoted(x, v), "member {v} outside P_{x}");
                }
                let size = foci.pair_size(&g, x, y).unwrap();
                assert!(size >= 2);
            }
        }
    }

    #[test]
    fn connector_sets_partition_common_neighbors() {
        let (rs, g) = setup(30, 4, 11);
        let rt = RestrictedTables::build(&rs, &g).unwrap();
        let foci = algorithm_one(&g, &rt).unwrap();
        for (&(x, y), conn) in &foci.connectors {
            assert!(!g.is_promoted(x, y), "connector key ({x},{y}) must be relegated");
            let common: Vec<usize> = g
                .promoted(x)
                .iter()
                .copied()
                .filter(|&v| g.promoted(y).binary_search(&v).is_ok())
                .collect();
            let mut union: Vec<usize> = conn.fwd.iter().chain(conn.rev.iter()).copied().collect();
            union.sort_unstable();
            assert_eq!(union, common, "pair ({x},{y})");
        }
    }

    #[test]
    fn traversal_budgets_hold() {
        let (rs, g) = setup(50, 6, 23);
        let rt = RestrictedTables::build(&rs, &g).unwrap();
        let foci = algorithm_one(&g, &rt).unwrap();
        let choose2: u64 = (0..50)
            .map(|x| {
                let d = g.degree(x) as u64;
                d * (d - 1) / 2
            })
            .sum();
        assert!(foci.comparisons <= 2 * choose2);
        assert!(foci.inner_steps <= 3 * choose2);
        assert!((foci.inner_steps as f64) <= 1.5 * g.degree_square_sum() as f64);
    }
}
