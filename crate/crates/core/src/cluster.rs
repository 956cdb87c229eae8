//! Cluster graph machinery shared by both pipelines: union-find components,
//! deterministic labels, and partition comparison.

use serde::Serialize;

/// Union-find with path compression and union by size.
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            self.parent[root] = self.parent[self.parent[root]];
            root = self.parent[root];
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// A thresholded cluster graph and its connected components.
///
/// Labels are deterministic: the component containing the smallest point id
/// gets label 0, the next unlabeled smallest id's component gets 1, etc.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterResult {
    pub threshold: f64,
    /// Kept edges with their mutual-cohesion weights.
    pub edges: Vec<(usize, usize, f64)>,
    pub labels: Vec<usize>,
    /// Size of component k at index k.
    pub component_sizes: Vec<usize>,
    pub oracle_calls: u64,
    pub inner_steps: u64,
}

/// Partition `n` points by the connected components of the kept edges.
pub fn components(n: usize, edges: &[(usize, usize, f64)]) -> (Vec<usize>, Vec<usize>) {
    let mut uf = UnionFind::new(n);
    for &(a, b, _) in edges {
        uf.union(a, b);
    }
    let mut labels = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for x in 0..n {
        let root = uf.find(x);
        if labels[root] == usize::MAX {
            labels[root] = sizes.len();
            sizes.push(0);
        }
        if x != root {
            labels[x] = labels[root];
        }
        sizes[labels[x]] += 1;
    }
    (labels, sizes)
}

/// Adjusted Rand Index between two partitions given as label vectors.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "partitions must cover the same points");
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![0u64; ka * kb];
    let mut rows = vec![0u64; ka];
    let mut cols = vec![0u64; kb];
    for i in 0..n {
        table[a[i] * kb + b[i]] += 1;
        rows[a[i]] += 1;
        cols[b[i]] += 1;
    }
    let c2 = |x: u64| (x * x.saturating_sub(1)) as f64 / 2.0;
    let sum_table: f64 = table.iter().map(|&x| c2(x)).sum();
    let sum_rows: f64 = rows.iter().map(|&x| c2(x)).sum();
    let sum_cols: f64 = cols.iter().map(|&x| c2(x)).sum();
    let pairs = c2(n as u64);
    let expected = sum_rows * sum_cols / pairs;
    let max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index - expected).abs() < f64::EPSILON {
        // Degenerate cases (all-singleton vs all-singleton, etc.).
        return if (sum_table - expected).abs() < f64::EPSILON {
            1.0
        } else {
            0.0
        };
    }
    (sum_table - expected) / (max_index - expected)
}
