//! Triplet-comparison oracles.
//!
//! An oracle answers `compare(x; y, z)`: which of `y`, `z` is more similar
//! to `x`. Built-in comparators cover symmetric metrics (point clouds),
//! asymmetric dissimilarity matrices, weighted star-graph path metrics, and
//! stored permutations (random tournaments, imported rank tables). Every
//! answered query bumps a monotone call counter.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use crate::error::{Axiom, Error, Result};

/// Raw three-point comparison. `Less` means `y` is more similar to `x`
/// than `z` is. Implementations must be safe for concurrent read-only use.
pub trait Comparator: Send + Sync {
    fn compare(&self, x: usize, y: usize, z: usize) -> Ordering;
}

/// A comparator for a fixed point set, together with the query counter.
pub struct TripletOracle {
    n: usize,
    cmp: Box<dyn Comparator>,
    calls: AtomicU64,
}

impl TripletOracle {
    pub fn new(n: usize, cmp: Box<dyn Comparator>) -> Self {
        Self {
            n,
            cmp,
            calls: AtomicU64::new(0),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total queries answered so far. Never decreases.
    pub fn calls(&self) -> u64 {
        self.calls.load(AtomicOrdering::Relaxed)
    }

    /// Answer `compare(x; y, z)` after validating the ids.
    pub fn compare(&self, x: usize, y: usize, z: usize) -> Result<Ordering> {
        for id in [x, y, z] {
            if id >= self.n {
                return Err(Error::InvalidInput(format!(
                    "unknown point id {id} (n = {})",
                    self.n
                )));
            }
        }
        Ok(self.query(x, y, z))
    }

    /// Uncounted-validation fast path; ids must already be in range.
    pub(crate) fn query(&self, x: usize, y: usize, z: usize) -> Ordering {
        debug_assert!(x < self.n && y < self.n && z < self.n);
        self.calls.fetch_add(1, AtomicOrdering::Relaxed);
        self.cmp.compare(x, y, z)
    }

    /// Strict `y ≺ₓ z` for distinct y, z. A tie is a totality violation.
    pub(crate) fn strictly_precedes(&self, x: usize, y: usize, z: usize) -> Result<bool> {
        match self.query(x, y, z) {
            Ordering::Less => Ok(true),
            Ordering::Greater => Ok(false),
            Ordering::Equal => Err(Error::AxiomViolation {
                axiom: Axiom::Totality,
                x,
                y,
                z,
            }),
        }
    }
}

/// Shared head of every well-formed comparator: identical arguments tie,
/// and the base point precedes everything else (autosimilarity).
#[inline]
fn self_rule(x: usize, y: usize, z: usize) -> Option<Ordering> {
    if y == z {
        Some(Ordering::Equal)
    } else if y == x {
        Some(Ordering::Less)
    } else if z == x {
        Some(Ordering::Greater)
    } else {
        None
    }
}

/// Euclidean point cloud; ties in distance broken by ascending point index.
pub struct EuclideanComparator {
    coords: Vec<f64>,
    dim: usize,
}

impl EuclideanComparator {
    pub fn new(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points
            .first()
            .ok_or_else(|| Error::InvalidInput("empty point set".into()))?
            .len();
        if dim == 0 {
            return Err(Error::InvalidInput("points must have dimension >= 1".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has dimension {} but point 0 has {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { coords, dim })
    }

    #[inline]
    fn dist2(&self, a: usize, b: usize) -> f64 {
        let pa = &self.coords[a * self.dim..(a + 1) * self.dim];
        let pb = &self.coords[b * self.dim..(b + 1) * self.dim];
        let mut acc = 0.0;
        for (u, v) in pa.iter().zip(pb) {
            let d = u - v;
            acc += d * d;
        }
        acc
    }
}

impl Comparator for EuclideanComparator {
    fn compare(&self, x: usize, y: usize, z: usize) -> Ordering {
        if let Some(o) = self_rule(x, y, z) {
            return o;
        }
        let dy = self.dist2(x, y);
        let dz = self.dist2(x, z);
        dy.partial_cmp(&dz)
            .unwrap_or(Ordering::Equal)
            .then_with(|| y.cmp(&z))
    }
}

/// Row-oriented dissimilarity matrix: row `x` is the view "from x", so the
/// matrix may be asymmetric (and the system non-concordant). Ties broken by
/// ascending index.
pub struct DissimilarityComparator {
    d: Vec<f64>,
    n: usize,
}

impl DissimilarityComparator {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "dissimilarity row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "dissimilarity[{i}][{j}] = {v}: entries must be finite and non-negative"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "dissimilarity[{i}][{i}] = {v}: diagonal must be zero"
                    )));
                }
            }
            d.extend_from_slice(row);
        }
        Ok(Self { d, n })
    }
}

impl Comparator for DissimilarityComparator {
    fn compare(&self, x: usize, y: usize, z: usize) -> Ordering {
        if let Some(o) = self_rule(x, y, z) {
            return o;
        }
        let dy = self.d[x * self.n + y];
        let dz = self.d[x * self.n + z];
        dy.partial_cmp(&dz)
            .unwrap_or(Ordering::Equal)
            .then_with(|| y.cmp(&z))
    }
}

/// Weighted path metric on a star: vertex 0 is the hub, leaf j sits at the
/// end of an edge of weight `w[j-1]`, and leaf-to-leaf distance is the sum
/// of the two edge weights. With strictly increasing weights every vertex
/// ranks the others in plain index order.
pub struct StarComparator {
    weights: Vec<f64>,
}

impl StarComparator {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("star needs at least one leaf".into()));
        }
        let mut prev = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !(w > prev) {
                return Err(Error::InvalidInput(format!(
                    "star weights must be strictly increasing and positive; w[{i}] = {w} after {prev}"
                )));
            }
            prev = w;
        }
        Ok(Self {
            weights: weights.to_vec(),
        })
    }

    fn rho(&self, a: usize, b: usize) -> f64 {
        match (a, b) {
            (0, j) => self.weights[j - 1],
            (i, 0) => self.weights[i - 1],
            (i, j) => self.weights[i - 1] + self.weights[j - 1],
        }
    }
}

impl Comparator for StarComparator {
    fn compare(&self, x: usize, y: usize, z: usize) -> Ordering {
        if let Some(o) = self_rule(x, y, z) {
            return o;
        }
        let dy = self.rho(x, y);
        let dz = self.rho(x, z);
        dy.partial_cmp(&dz)
            .unwrap_or(Ordering::Equal)
            .then_with(|| y.cmp(&z))
    }
}

/// One stored permutation per base point: `rank[x*n + y]` is the position of
/// `y` in x's order (0 for the base itself). Backs both random tournaments
/// and imported rank tables.
pub struct PermutationComparator {
    rank: Vec<u32>,
    n: usize,
}

impl PermutationComparator {
    /// `rank` is row-major n*n; row x must map `S \ {x}` bijectively onto
    /// 1..=n-1 with `rank[x*n + x] = 0`.
    pub fn new(n: usize, rank: Vec<u32>) -> Result<Self> {
        if rank.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "rank table has {} entries, expected {}",
                rank.len(),
                n * n
            )));
        }
        for x in 0..n {
            let row = &rank[x * n..(x + 1) * n];
            let mut seen = vec![false; n];
            for (y, &r) in row.iter().enumerate() {
                let r = r as usize;
                if y == x {
                    if r != 0 {
                        return Err(Error::InvalidInput(format!(
                            "rank table row {x}: self rank must be 0, got {r}"
                        )));
                    }
                    continue;
                }
                if r == 0 || r >= n || seen[r] {
                    return Err(Error::InvalidInput(format!(
                        "rank table row {x}: ranks must be a bijection onto 1..={}, bad rank {r} for member {y}",
                        n - 1
                    )));
                }
                seen[r] = true;
            }
        }
        Ok(Self { rank, n })
    }
}

impl Comparator for PermutationComparator {
    fn compare(&self, x: usize, y: usize, z: usize) -> Ordering {
        if let Some(o) = self_rule(x, y, z) {
            return o;
        }
        self.rank[x * self.n + y].cmp(&self.rank[x * self.n + z])
    }
}
