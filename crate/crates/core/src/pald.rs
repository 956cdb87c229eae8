//! Exact cubic-time reference pipeline: conflict foci, cohesion matrix,
//! local depth, cluster threshold, cluster graph.
//!
//! The normative object is the disjoint union `U_{x,y} = U_{x‖y} ⊔ U_{y‖x}`
//! with `U_{x‖y} = {x} ∪ {z : z ≺ₓ y and x ≺_z y}`, and the cohesion entry
//! `C_{x,v} = (1/(n-1)) Σ_{y≠x} 1{v ∈ U_{x‖y}} / |U_{x,y}|`.

use rayon::prelude::*;

use crate::cluster::{components, ClusterResult};
use crate::error::{Error, Result};
use crate::ranking::table::FullRankTables;

/// Default refusal cap for the dense cubic pipeline; the CLI rejects larger
/// inputs unless forced.
pub const DEFAULT_MAX_EXACT_N: usize = 5000;

/// Sizes of every conflict focus, plus the one-sided (left) sizes.
pub struct ConflictFociStore {
    n: usize,
    /// |U_{x,y}| at the triangular index of the unordered pair.
    size: Vec<u32>,
    /// |U_{lo‖hi}| and |U_{hi‖lo}| at the same index.
    left_lo: Vec<u32>,
    left_hi: Vec<u32>,
}

#[inline]
fn tri_index(n: usize, x: usize, y: usize) -> usize {
    debug_assert!(x < y && y < n);
    x * n - x * (x + 1) / 2 + (y - x - 1)
}

impl ConflictFociStore {
    pub fn n(&self) -> usize {
        self.n
    }

    /// |U_{x,y}| for distinct x, y.
    pub fn size(&self, x: usize, y: usize) -> Result<u32> {
        let (lo, hi) = order_pair(x, y)?;
        Ok(self.size[tri_index(self.n, lo, hi)])
    }

    /// |U_{x‖y}| for the ordered pair (x, y).
    pub fn left_size(&self, x: usize, y: usize) -> Result<u32> {
        let (lo, hi) = order_pair(x, y)?;
        let i = tri_index(self.n, lo, hi);
        Ok(if x == lo { self.left_lo[i] } else { self.left_hi[i] })
    }
}

fn order_pair(x: usize, y: usize) -> Result<(usize, usize)> {
    if x == y {
        return Err(Error::InvalidInput(format!(
            "conflict focus requires distinct points, got x = y = {x}"
        )));
    }
    Ok((x.min(y), x.max(y)))
}

/// Explicit membership of the two one-sided foci for one pair.
///
/// Returns `(U_{x‖y}, U_{y‖x})`; the sets are disjoint and their union is
/// the conflict focus of the pair.
pub fn conflict_focus(
    tables: &FullRankTables,
    x: usize,
    y: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = tables.n();
    if x >= n || y >= n {
        return Err(Error::InvalidInput(format!(
            "point id out of range (n = {n})"
        )));
    }
    order_pair(x, y)?;
    let mut left = vec![x];
    let mut right = vec![y];
    for z in 0..n {
        if z == x || z == y {
            continue;
        }
        if tables.precedes(x, z, y) && tables.precedes(z, x, y) {
            left.push(z);
        } else if tables.precedes(y, z, x) && tables.precedes(z, y, x) {
            right.push(z);
        }
    }
    left.sort_unstable();
    right.sort_unstable();
    Ok((left, right))
}

/// Dense row-major cohesion matrix.
#[derive(Debug, Clone)]
pub struct DenseCohesion {
    n: usize,
    values: Vec<f64>,
}

impl DenseCohesion {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, v: usize) -> f64 {
        self.values[x * self.n + v]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.values[x * self.n..(x + 1) * self.n]
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|x| self.get(x, x))
    }

    /// Mutual-cohesion edge weight `min{C_{x,y}, C_{y,x}}`.
    pub fn mutual_weight(&self, x: usize, y: usize) -> f64 {
        self.get(x, y).min(self.get(y, x))
    }
}

/// Everything the exact pipeline produces before thresholding.
pub struct ExactPald {
    pub cohesion: DenseCohesion,
    pub foci: ConflictFociStore,
    pub local_depth: Vec<f64>,
    pub tau: f64,
    pub inner_steps: u64,
}

/// Compute all conflict-focus sizes and the full cohesion matrix in
/// O(n^3) steps. Rows are independent and run in parallel.
pub fn cohesion_matrix_exact(tables: &FullRankTables) -> Result<ExactPald> {
    let n = tables.n();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "exact pipeline needs n >= 3, got {n}"
        )));
    }

    // Pass 1: focus sizes per unordered pair.
    let per_x: Vec<(Vec<(usize, u32, u32)>, u64)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut out = Vec::with_capacity(n - x - 1);
            let mut steps = 0u64;
            for y in (x + 1)..n {
                let mut left = 1u32;
                let mut right = 1u32;
                for z in 0..n {
                    if z == x || z == y {
                        continue;
                    }
                    steps += 1;
                    if tables.precedes(x, z, y) && tables.precedes(z, x, y) {
                        left += 1;
                    } else if tables.precedes(y, z, x) && tables.precedes(z, y, x) {
                        right += 1;
                    }
                }
                out.push((tri_index(n, x, y), left, right));
            }
            (out, steps)
        })
        .collect();

    let pairs = n * (n - 1) / 2;
    let mut size = vec![0u32; pairs];
    let mut left_lo = vec![0u32; pairs];
    let mut left_hi = vec![0u32; pairs];
    let mut steps: u64 = 0;
    for (rows, s) in per_x {
        steps += s;
        for (i, left, right) in rows {
            left_lo[i] = left;
            left_hi[i] = right;
            size[i] = left + right;
        }
    }
    let foci = ConflictFociStore {
        n,
        size,
        left_lo,
        left_hi,
    };

    // Pass 2: cohesion rows, accumulated in ascending y order per row.
    let rows: Vec<(Vec<f64>, u64)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut row = vec![0.0f64; n];
            let mut steps = 0u64;
            let norm = 1.0 / (n as f64 - 1.0);
            for y in 0..n {
                if y == x {
                    continue;
                }
                let (lo, hi) = (x.min(y), x.max(y));
                let w = norm / f64::from(foci.size[tri_index(n, lo, hi)]);
                row[x] += w;
                for v in 0..n {
                    if v == x || v == y {
                        continue;
                    }
                    steps += 1;
                    if tables.precedes(x, v, y) && tables.precedes(v, x, y) {
                        row[v] += w;
                    }
                }
            }
            (row, steps)
        })
        .collect();

    let mut values = Vec::with_capacity(n * n);
    for (row, s) in rows {
        steps += s;
        values.extend_from_slice(&row);
    }
    let cohesion = DenseCohesion { n, values };
    let local_depth = local_depth_from_foci(&foci);
    let tau = cluster_threshold(&cohesion);
    Ok(ExactPald {
        cohesion,
        foci,
        local_depth,
        tau,
        inner_steps: steps,
    })
}

/// Local depth from the focus sizes: `ℓ(x) = (1/(n-1)) Σ_y |U_{x‖y}|/|U_{x,y}|`.
pub fn local_depth_from_foci(foci: &ConflictFociStore) -> Vec<f64> {
    let n = foci.n;
    let norm = 1.0 / (n as f64 - 1.0);
    (0..n)
        .map(|x| {
            let mut acc = 0.0;
            for y in 0..n {
                if y == x {
                    continue;
                }
                let (lo, hi) = (x.min(y), x.max(y));
                let i = tri_index(n, lo, hi);
                let left = if x == lo { foci.left_lo[i] } else { foci.left_hi[i] };
                acc += f64::from(left) / f64::from(foci.size[i]);
            }
            acc * norm
        })
        .collect()
}

/// `τ = Σₓ C_{x,x} / (2n)`: half the average diagonal cohesion.
pub fn cluster_threshold(cohesion: &DenseCohesion) -> f64 {
    let n = cohesion.n;
    cohesion.diagonal().sum::<f64>() / (2.0 * n as f64)
}

/// Keep edges whose mutual cohesion reaches `tau` and label the connected
/// components of the kept-edge graph.
pub fn cluster_graph(cohesion: &DenseCohesion, tau: f64) -> ClusterResult {
    let n = cohesion.n;
    let mut edges = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let w = cohesion.mutual_weight(x, y);
            if w >= tau {
                edges.push((x, y, w));
            }
        }
    }
    let (labels, component_sizes) = components(n, &edges);
    ClusterResult {
        threshold: tau,
        edges,
        labels,
        component_sizes,
        oracle_calls: 0,
        inner_steps: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::RankingSystem;

    fn line_013() -> FullRankTables {
        RankingSystem::from_points(&[vec![0.0], vec![1.0], vec![3.0]])
            .unwrap()
            .full_tables()
            .unwrap()
    }

    #[test]
    fn line_conflict_foci() {
        let t = line_013();
        // Pair {x, y}: each endpoint stands alone.
        let (l, r) = conflict_focus(&t, 0, 1).unwrap();
        assert_eq!(l, vec![0]);
        assert_eq!(r, vec![1]);
        // Pair {x, z} with y in between: y joins x's side.
        let (l, r) = conflict_focus(&t, 0, 2).unwrap();
        assert_eq!(l, vec![0, 1]);
        assert_eq!(r, vec![2]);
    }

    #[test]
    fn conflict_focus_rejects_equal_points() {
        let t = line_013();
        assert!(conflict_focus(&t, 1, 1).is_err());
    }

    #[test]
    fn line_cohesion_hand_values() {
        let out = cohesion_matrix_exact(&line_013()).unwrap();
        let c = &out.cohesion;
        let eps = 1e-12;
        assert!((c.get(0, 0) - 5.0 / 12.0).abs() < eps);
        assert!((c.get(1, 1) - 5.0 / 12.0).abs() < eps);
        assert!((c.get(2, 2) - 1.0 / 3.0).abs() < eps);
        assert!((c.get(0, 1) - 1.0 / 6.0).abs() < eps);
        assert!((c.get(1, 0) - 1.0 / 6.0).abs() < eps);
        for (x, v) in [(0, 2), (2, 0), (1, 2), (2, 1)] {
            assert!(c.get(x, v).abs() < eps, "C[{x}][{v}] = {}", c.get(x, v));
        }
        assert!((out.tau - 7.0 / 36.0).abs() < eps);
        assert!((out.local_depth[0] - 7.0 / 12.0).abs() < eps);
        assert!((out.local_depth[1] - 7.0 / 12.0).abs() < eps);
        assert!((out.local_depth[2] - 1.0 / 3.0).abs() < eps);
    }

    #[test]
    fn n_two_is_rejected() {
        let rs = RankingSystem::from_points(&[vec![0.0], vec![1.0]]).unwrap();
        let t = rs.full_tables().unwrap();
        assert!(cohesion_matrix_exact(&t).is_err());
    }

    #[test]
    fn diagonal_dominates_row() {
        let rs = crate::ranking::gen_euclidean(25, 3, 17).unwrap();
        let out = cohesion_matrix_exact(&rs.full_tables().unwrap()).unwrap();
        for x in 0..25 {
            let diag = out.cohesion.get(x, x);
            assert!(diag > 0.0);
            for v in 0..25 {
                assert!(out.cohesion.get(x, v) <= diag + 1e-15);
                assert!(out.cohesion.get(x, v) >= 0.0);
            }
        }
    }

    #[test]
    fn trivial_thresholds() {
        let out = cohesion_matrix_exact(&line_013()).unwrap();
        // tau = 0 keeps every edge: one component.
        let all = cluster_graph(&out.cohesion, 0.0);
        assert_eq!(all.component_sizes, vec![3]);
        // tau above the max entry keeps none: all singletons.
        let none = cluster_graph(&out.cohesion, 1.0);
        assert_eq!(none.component_sizes, vec![1, 1, 1]);
        assert_eq!(none.labels, vec![0, 1, 2]);
    }

    #[test]
    fn left_sizes_partition_focus() {
        let rs = crate::ranking::gen_random_tournament(20, 2).unwrap();
        let out = cohesion_matrix_exact(&rs.full_tables().unwrap()).unwrap();
        for x in 0..20 {
            for y in (x + 1)..20 {
                let s = out.foci.size(x, y).unwrap();
                let l = out.foci.left_size(x, y).unwrap();
                let r = out.foci.left_size(y, x).unwrap();
                assert_eq!(l + r, s);
                assert_eq!(s, out.foci.size(y, x).unwrap());
                assert!(s >= 2 && s as usize <= 20);
            }
        }
    }
}
