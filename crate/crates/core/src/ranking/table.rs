//! Rank tables: materialized total orders.
//!
//! A rank table sorts a candidate set by an oracle's order at a base point
//! and records integer ranks, so later `y ≺ₓ z` decisions are two lookups
//! instead of oracle calls. Sorting is a plain top-down merge sort so the
//! comparison count is bounded by `c·⌈log₂ c⌉ - 2^⌈log₂ c⌉ + 1`; together
//! with the post-sort consistency sweep this stays within the declared
//! `⌈c log₂ c⌉ + c` budget.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Axiom, Error, Result};
use crate::ranking::oracle::TripletOracle;

/// One base point's order over a candidate set, with 1-based ranks.
#[derive(Debug, Clone)]
pub struct RankTable {
    base: usize,
    order: Vec<usize>,
    rank: HashMap<usize, usize>,
}

impl RankTable {
    pub fn base(&self) -> usize {
        self.base
    }

    /// Candidates sorted most-similar first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// 1-based rank of `y`, or None if `y` is not a candidate.
    pub fn rank_of(&self, y: usize) -> Option<usize> {
        self.rank.get(&y).copied()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Sort `items` by `≺ₓ` with counted oracle calls, then verify each adjacent
/// pair really is in increasing order. The sweep catches oracles whose
/// answers were not consistent with any total order, naming the offending
/// triple.
pub(crate) fn sort_by_base_order(
    oracle: &TripletOracle,
    x: usize,
    items: &mut [usize],
) -> Result<()> {
    merge_sort(oracle, x, items)?;
    for w in items.windows(2) {
        match oracle.query(x, w[0], w[1]) {
            std::cmp::Ordering::Less => {}
            std::cmp::Ordering::Equal => {
                return Err(Error::AxiomViolation {
                    axiom: Axiom::Totality,
                    x,
                    y: w[0],
                    z: w[1],
                })
            }
            std::cmp::Ordering::Greater => {
                return Err(Error::AxiomViolation {
                    axiom: Axiom::Antisymmetry,
                    x,
                    y: w[0],
                    z: w[1],
                })
            }
        }
    }
    Ok(())
}

fn merge_sort(oracle: &TripletOracle, x: usize, v: &mut [usize]) -> Result<()> {
    let n = v.len();
    if n <= 1 {
        return Ok(());
    }
    let mid = n / 2;
    merge_sort(oracle, x, &mut v[..mid])?;
    merge_sort(oracle, x, &mut v[mid..])?;
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if oracle.strictly_precedes(x, v[j], v[i])? {
            merged.push(v[j]);
            j += 1;
        } else {
            merged.push(v[i]);
            i += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..n]);
    v.copy_from_slice(&merged);
    Ok(())
}

/// Sort a candidate set by the oracle's order at `x` and assign ranks
/// 1..=|candidates|.
pub fn build_rank_table(
    oracle: &TripletOracle,
    x: usize,
    candidates: &[usize],
) -> Result<RankTable> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("empty candidate set".into()));
    }
    if x >= oracle.n() {
        return Err(Error::InvalidInput(format!("unknown base id {x}")));
    }
    let mut seen = HashMap::with_capacity(candidates.len());
    for &c in candidates {
        if c >= oracle.n() {
            return Err(Error::InvalidInput(format!("unknown candidate id {c}")));
        }
        if c == x {
            return Err(Error::InvalidInput(format!(
                "base {x} may not appear among its own candidates"
            )));
        }
        if seen.insert(c, ()).is_some() {
            return Err(Error::InvalidInput(format!("duplicate candidate id {c}")));
        }
    }
    let mut order = candidates.to_vec();
    sort_by_base_order(oracle, x, &mut order)?;
    let rank = order
        .iter()
        .enumerate()
        .map(|(i, &y)| (y, i + 1))
        .collect();
    Ok(RankTable {
        base: x,
        order,
        rank,
    })
}

/// All n per-point orders over the n-1 other points, stored as a flat
/// rank matrix: `rank[x*n + y]` in 1..=n-1, 0 on the diagonal.
pub struct FullRankTables {
    n: usize,
    rank: Vec<u32>,
}

impl FullRankTables {
    /// Build every table; independent rows run in parallel.
    pub fn build(oracle: &TripletOracle) -> Result<Self> {
        let n = oracle.n();
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut others: Vec<usize> = (0..n).filter(|&y| y != x).collect();
                sort_by_base_order(oracle, x, &mut others)?;
                let mut row = vec![0u32; n];
                for (i, &y) in others.iter().enumerate() {
                    row[y] = (i + 1) as u32;
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        let mut rank = Vec::with_capacity(n * n);
        for row in rows {
            rank.extend_from_slice(&row);
        }
        Ok(Self { n, rank })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based rank of `y` in x's order; 0 when `y == x`.
    #[inline]
    pub fn rank(&self, x: usize, y: usize) -> u32 {
        self.rank[x * self.n + y]
    }

    /// `y ≺ₓ z` (strict; the base point precedes everyone).
    #[inline]
    pub fn precedes(&self, x: usize, y: usize, z: usize) -> bool {
        self.rank(x, y) < self.rank(x, z)
    }

    /// x's order over the other points, most-similar first.
    pub fn row_order(&self, x: usize) -> Vec<usize> {
        let mut order = vec![0usize; self.n - 1];
        for y in 0..self.n {
            let r = self.rank(x, y);
            if r > 0 {
                order[(r - 1) as usize] = y;
            }
        }
        order
    }

    /// View row `x` as a `RankTable` over all other points.
    pub fn table(&self, x: usize) -> RankTable {
        let order = self.row_order(x);
        let rank = order
            .iter()
            .enumerate()
            .map(|(i, &y)| (y, i + 1))
            .collect();
        RankTable {
            base: x,
            order,
            rank,
        }
    }
}
