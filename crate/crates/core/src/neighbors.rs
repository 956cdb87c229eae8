//! Friend sets, the nearest-neighbor digraph, and the promoted/relegated
//! pair classification.
//!
//! Friends `Γₓ` are the Kₓ nearest points under `≺ₓ`; a pair is promoted
//! when either endpoint is a friend of the other, relegated otherwise.
//! Relegated pairs are never materialized as a list — membership is the
//! complement of the promoted adjacency.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ranking::table::{sort_by_base_order, FullRankTables};
use crate::ranking::RankingSystem;

/// Friend-set sizes: one K for everyone, or a per-point override.
#[derive(Debug, Clone)]
pub enum KSpec {
    Uniform(usize),
    PerPoint(Vec<usize>),
}

impl KSpec {
    fn validate(&self, n: usize) -> Result<Vec<usize>> {
        let check = |k: usize| -> Result<usize> {
            if k <= 1 || k >= n - 1 {
                Err(Error::InvalidInput(format!(
                    "friend-set size must satisfy 1 < K < n-1 (n = {n}), got {k}"
                )))
            } else {
                Ok(k)
            }
        };
        match self {
            KSpec::Uniform(k) => {
                let k = check(*k)?;
                Ok(vec![k; n])
            }
            KSpec::PerPoint(ks) => {
                if ks.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "per-point K has {} entries for n = {n}",
                        ks.len()
                    )));
                }
                ks.iter().map(|&k| check(k)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    Promoted,
    Relegated,
}

/// Above this many candidates we select the top K before sorting instead of
/// sorting the whole candidate set.
const FULL_SORT_LIMIT: usize = 2048;

/// Γₓ for every x, in rank order, straight from the oracle.
pub fn build_friend_sets(rs: &RankingSystem, k: &KSpec) -> Result<Vec<Vec<usize>>> {
    let n = rs.n();
    let ks = k.validate(n)?;
    let oracle = rs.oracle();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let kx = ks[x];
            let mut others: Vec<usize> = (0..n).filter(|&y| y != x).collect();
            if others.len() > FULL_SORT_LIMIT {
                others.select_nth_unstable_by(kx - 1, |&a, &b| oracle.query(x, a, b));
                others.truncate(kx);
            }
            sort_by_base_order(oracle, x, &mut others)?;
            others.truncate(kx);
            Ok(others)
        })
        .collect()
}

/// Γₓ as the first Kₓ entries of already-built full rank tables.
pub fn friend_sets_from_tables(tables: &FullRankTables, k: &KSpec) -> Result<Vec<Vec<usize>>> {
    let n = tables.n();
    let ks = k.validate(n)?;
    Ok((0..n)
        .map(|x| {
            let mut order = tables.row_order(x);
            order.truncate(ks[x]);
            order
        })
        .collect())
}

/// Check externally supplied friend sets against the precedence property:
/// every friend of x precedes every stranger of x under `≺ₓ`. Relies on the
/// oracle's transitivity: only the worst friend is compared to strangers.
pub fn validate_friend_sets(rs: &RankingSystem, friends: &[Vec<usize>]) -> Result<()> {
    let n = rs.n();
    if friends.len() != n {
        return Err(Error::InvalidInput(format!(
            "friend sets cover {} points for n = {n}",
            friends.len()
        )));
    }
    let oracle = rs.oracle();
    for (x, fx) in friends.iter().enumerate() {
        if fx.len() <= 1 || fx.len() >= n - 1 {
            return Err(Error::InvalidInput(format!(
                "point {x}: |Γ| = {} violates 1 < K < n-1",
                fx.len()
            )));
        }
        let mut member = vec![false; n];
        for &y in fx {
            if y >= n || y == x {
                return Err(Error::InvalidInput(format!(
                    "point {x}: invalid friend {y}"
                )));
            }
            if std::mem::replace(&mut member[y], true) {
                return Err(Error::InvalidInput(format!(
                    "point {x}: duplicate friend {y}"
                )));
            }
        }
        let mut worst = fx[0];
        for &y in &fx[1..] {
            if oracle.strictly_precedes(x, worst, y)? {
                worst = y;
            }
        }
        for z in 0..n {
            if z == x || member[z] {
                continue;
            }
            if !oracle.strictly_precedes(x, worst, z)? {
                return Err(Error::InvalidInput(format!(
                    "friend precedence fails at x = {x}: stranger {z} precedes friend {worst}"
                )));
            }
        }
    }
    Ok(())
}

/// The promoted-pair graph `(S, 𝒫)` together with the friend sets that
/// induced it. Immutable once built.
pub struct NeighborGraph {
    friends: Vec<Vec<usize>>,
    promoted: Vec<Vec<usize>>,
    pair_set: HashSet<(usize, usize)>,
    k_min: usize,
    k_bar: f64,
}

impl NeighborGraph {
    /// Symmetrize friend sets into the promoted adjacency.
    pub fn from_friend_sets(friends: Vec<Vec<usize>>) -> Result<Self> {
        let n = friends.len();
        if n < 3 {
            return Err(Error::InvalidInput("need n >= 3".into()));
        }
        let mut promoted: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut pair_set = HashSet::new();
        for (x, fx) in friends.iter().enumerate() {
            for &y in fx {
                if y >= n || y == x {
                    return Err(Error::InvalidInput(format!(
                        "point {x}: invalid friend {y}"
                    )));
                }
                if pair_set.insert((x.min(y), x.max(y))) {
                    promoted[x].push(y);
                    promoted[y].push(x);
                }
            }
        }
        promoted.par_iter_mut().for_each(|adj| adj.sort_unstable());
        let k_min = friends.iter().map(Vec::len).min().unwrap_or(0);
        let k_bar = friends.iter().map(Vec::len).sum::<usize>() as f64 / n as f64;
        Ok(Self {
            friends,
            promoted,
            pair_set,
            k_min,
            k_bar,
        })
    }

    pub fn n(&self) -> usize {
        self.friends.len()
    }

    /// Γₓ in rank order.
    pub fn friends(&self, x: usize) -> &[usize] {
        &self.friends[x]
    }

    /// 𝒫ₓ sorted by point id.
    pub fn promoted(&self, x: usize) -> &[usize] {
        &self.promoted[x]
    }

    /// dₓ = |𝒫ₓ|.
    pub fn degree(&self, x: usize) -> usize {
        self.promoted[x].len()
    }

    /// K = min Kₓ, the minimum friend-set size.
    pub fn k_min(&self) -> usize {
        self.k_min
    }

    /// K̄ = Σ Kₓ / n, the mean friend-set size.
    pub fn k_bar(&self) -> f64 {
        self.k_bar
    }

    /// |𝒫|, the number of promoted pairs.
    pub fn edge_count(&self) -> usize {
        self.pair_set.len()
    }

    /// Σₓ dₓ².
    pub fn degree_square_sum(&self) -> u64 {
        (0..self.n())
            .map(|x| (self.degree(x) as u64) * (self.degree(x) as u64))
            .sum()
    }

    pub fn is_promoted(&self, x: usize, y: usize) -> bool {
        self.pair_set.contains(&(x.min(y), x.max(y)))
    }

    pub fn pair_class(&self, x: usize, y: usize) -> Result<PairClass> {
        if x == y {
            return Err(Error::InvalidInput(
                "pair classification needs distinct points".into(),
            ));
        }
        if x >= self.n() || y >= self.n() {
            return Err(Error::InvalidInput("point id out of range".into()));
        }
        Ok(if self.is_promoted(x, y) {
            PairClass::Promoted
        } else {
            PairClass::Relegated
        })
    }

    /// Canonical promoted pairs (x < y), ascending.
    pub fn promoted_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self.pair_set.iter().copied().collect();
        edges.sort_unstable();
        edges
    }

    /// Nearest-neighbor digraph arcs (x -> each friend), for export.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.friends
            .iter()
            .enumerate()
            .flat_map(|(x, fx)| fx.iter().map(move |&y| (x, y)))
    }

    /// Cap chosen so that hub-dominated instances abort instead of silently
    /// running a quadratic inner loop.
    pub fn default_degree_cap(&self) -> usize {
        let by_size = (4.0 * (self.n() as f64 * self.k_bar).sqrt()).ceil() as usize;
        by_size.max(8 * self.k_min)
    }

    /// Error with the offending vertices (worst first) if any promoted
    /// degree exceeds `cap`.
    pub fn check_degree_cap(&self, cap: usize) -> Result<()> {
        let mut offenders: Vec<(usize, usize)> = (0..self.n())
            .filter(|&x| self.degree(x) > cap)
            .map(|x| (x, self.degree(x)))
            .collect();
        if offenders.is_empty() {
            return Ok(());
        }
        offenders.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        Err(Error::DegreeCapExceeded {
            cap,
            vertices: offenders,
        })
    }
}

/// Degree groupings for the averaging machinery: Λ₁ holds the distinct
/// values of dₓ+1, Λ₂ the unordered pairs drawn from Λ₁.
#[derive(Debug, Clone)]
pub struct DegreeGroups {
    pub lambda1: Vec<usize>,
    /// count(β) = #{y : d_y = β - 1}, keyed by β ∈ Λ₁.
    pub counts: Vec<(usize, usize)>,
    pub lambda2: Vec<(usize, usize)>,
}

/// Group vertices by degree. Panics if the distinct-degree bound
/// `t < sqrt(4m - 2nK) + 1` fails, which would mean the promoted graph is
/// malformed.
pub fn degree_groups(g: &NeighborGraph) -> DegreeGroups {
    let n = g.n();
    let mut hist: Vec<usize> = vec![0; n + 1];
    for x in 0..n {
        hist[g.degree(x)] += 1;
    }
    let mut lambda1 = Vec::new();
    let mut counts = Vec::new();
    for (d, &c) in hist.iter().enumerate() {
        if c > 0 {
            lambda1.push(d + 1);
            counts.push((d + 1, c));
        }
    }
    // Distinct-degree bound: degrees d_1 >= ... >= d_n >= K with t distinct
    // values force 2m >= nK + t(t-1)/2. For t >= 2 this yields the strict
    // form t < sqrt(4m - 2nK) + 1; at t = 1 (regular graphs) only the
    // non-strict inequality holds, with equality when m = nK/2.
    let t = lambda1.len();
    let m = g.edge_count();
    let slack = 2 * m - n * g.k_min();
    assert!(
        t * (t - 1) / 2 <= slack,
        "distinct-degree bound violated: t = {t}, 2m - nK = {slack}"
    );
    if t >= 2 {
        let bound = (2.0 * slack as f64).sqrt() + 1.0;
        assert!(
            (t as f64) < bound,
            "distinct-degree bound violated: t = {t}, bound = {bound}"
        );
    }
    let mut lambda2 = Vec::with_capacity(lambda1.len() * (lambda1.len() + 1) / 2);
    for (i, &a) in lambda1.iter().enumerate() {
        for &b in &lambda1[i..] {
            lambda2.push((a, b));
        }
    }
    DegreeGroups {
        lambda1,
        counts,
        lambda2,
    }
}
