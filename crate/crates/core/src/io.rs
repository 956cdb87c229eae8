//! File formats: points, dissimilarity matrices, rank tables, and the
//! exported artifacts (labels, cohesion, edge weights, digraph arcs).
//!
//! Points: header `id,c1,...,cd`, one point per row, unique non-empty ids.
//! Dissimilarity: headerless n x n matrix, zero diagonal, asymmetry allowed
//! (row i is the view from point i). Rank tables: header `base,member,rank`
//! with each base mapping the other ids bijectively onto 1..=n-1.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pald::DenseCohesion;
use crate::pannld::SparseCohesion;
use crate::ranking::RankingSystem;

fn csv_err(path: &Path, row: usize, col: Option<usize>, msg: impl Into<String>) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        row,
        col,
        msg: msg.into(),
    }
}

/// Point ids in index order.
#[derive(Debug, Clone)]
pub struct IdMap {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    pub fn new(ids: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if id.is_empty() {
                return Err(Error::InvalidInput(format!("point {i} has an empty id")));
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate point id {id:?}")));
            }
        }
        Ok(Self { ids, index })
    }

    pub fn numbered(n: usize) -> Self {
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let index = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        Self { ids, index }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }
}

/// Read a points CSV into ids and coordinate rows.
pub fn read_points_csv(path: &Path) -> Result<(IdMap, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    let header = reader
        .headers()
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?
        .clone();
    if header.is_empty() || header.get(0) != Some("id") {
        return Err(csv_err(path, 0, Some(1), "first header column must be `id`"));
    }
    let dim = header.len() - 1;
    if dim == 0 {
        return Err(csv_err(path, 0, None, "no coordinate columns"));
    }
    let mut ids = Vec::new();
    let mut coords = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // 1-based, after the header
        let record = record.map_err(|e| csv_err(path, row, None, e.to_string()))?;
        if record.len() != dim + 1 {
            return Err(csv_err(
                path,
                row,
                None,
                format!("expected {} fields, found {}", dim + 1, record.len()),
            ));
        }
        ids.push(record[0].to_string());
        let mut point = Vec::with_capacity(dim);
        for c in 1..=dim {
            let v: f64 = record[c]
                .parse()
                .map_err(|e| csv_err(path, row, Some(c + 1), format!("bad number: {e}")))?;
            if !v.is_finite() {
                return Err(csv_err(path, row, Some(c + 1), "coordinate must be finite"));
            }
            point.push(v);
        }
        coords.push(point);
    }
    Ok((IdMap::new(ids)?, coords))
}

pub fn write_points_csv(path: &Path, ids: &IdMap, coords: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    let dim = coords.first().map_or(0, Vec::len);
    let mut header = vec!["id".to_string()];
    header.extend((1..=dim).map(|c| format!("c{c}")));
    w.write_record(&header)
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    for (i, point) in coords.iter().enumerate() {
        let mut record = vec![ids.id(i).to_string()];
        record.extend(point.iter().map(|v| format!("{v}")));
        w.write_record(&record)
            .map_err(|e| csv_err(path, i + 2, None, e.to_string()))?;
    }
    w.flush().map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    Ok(())
}

/// Read a headerless n x n dissimilarity matrix.
pub fn read_dissimilarity_csv(path: &Path) -> Result<(IdMap, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_err(path, row, None, e.to_string()))?;
        let mut values = Vec::with_capacity(record.len());
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|e| csv_err(path, row, Some(c + 1), format!("bad number: {e}")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(csv_err(
                    path,
                    row,
                    Some(c + 1),
                    "entries must be finite and non-negative",
                ));
            }
            values.push(v);
        }
        rows.push(values);
    }
    let n = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(csv_err(
                path,
                i + 1,
                None,
                format!("matrix is not square: row has {} entries for n = {n}", r.len()),
            ));
        }
        if r[i] != 0.0 {
            return Err(csv_err(path, i + 1, Some(i + 1), "diagonal must be zero"));
        }
    }
    Ok((IdMap::numbered(n), rows))
}

/// Read rank tables (`base,member,rank`). Ids are indexed in order of first
/// appearance in the `base` column, so re-importing an export reproduces
/// the original indexing; every base must rank all the other ids
/// bijectively onto 1..=n-1.
pub fn read_rank_tables_csv(path: &Path) -> Result<(IdMap, RankingSystem)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut records: Vec<(String, String, usize, usize)> = Vec::new(); // base, member, rank, row
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| csv_err(path, row, None, e.to_string()))?;
        if record.len() != 3 {
            return Err(csv_err(path, row, None, "expected base,member,rank"));
        }
        if !index.contains_key(&record[0]) {
            index.insert(record[0].to_string(), ids.len());
            ids.push(record[0].to_string());
        }
        let rank: usize = record[2]
            .parse()
            .map_err(|e| csv_err(path, row, Some(3), format!("bad rank: {e}")))?;
        records.push((record[0].to_string(), record[1].to_string(), rank, row));
    }
    let mut triples: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(records.len());
    for (base, member, rank, row) in records {
        let b = index[&base];
        let m = *index.get(&member).ok_or_else(|| {
            csv_err(
                path,
                row,
                Some(2),
                format!("member {member:?} never appears as a base"),
            )
        })?;
        triples.push((b, m, rank, row));
    }
    let n = ids.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "rank tables describe {n} points; need at least 3"
        )));
    }
    let mut rank = vec![0u32; n * n];
    let mut filled = vec![0usize; n];
    for (base, member, r, row) in triples {
        if base == member {
            return Err(csv_err(path, row, None, "base may not rank itself"));
        }
        if r == 0 || r >= n {
            return Err(csv_err(
                path,
                row,
                Some(3),
                format!("rank {r} outside 1..={}", n - 1),
            ));
        }
        if rank[base * n + member] != 0 {
            return Err(csv_err(path, row, None, "duplicate (base, member) entry"));
        }
        rank[base * n + member] = r as u32;
        filled[base] += 1;
    }
    for (b, &count) in filled.iter().enumerate() {
        if count != n - 1 {
            return Err(Error::InvalidInput(format!(
                "base {:?} ranks {count} members; expected {}",
                ids[b],
                n - 1
            )));
        }
    }
    let rs = RankingSystem::from_rank_matrix(n, rank)?;
    Ok((IdMap::new(ids)?, rs))
}

/// Export full rank tables as `base,member,rank` rows in index order.
pub fn write_rank_tables_csv(
    path: &Path,
    ids: &IdMap,
    tables: &crate::ranking::table::FullRankTables,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    w.write_record(["base", "member", "rank"])
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    for x in 0..tables.n() {
        for (i, y) in tables.row_order(x).iter().enumerate() {
            w.write_record([ids.id(x), ids.id(*y), &(i + 1).to_string()])
                .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
        }
    }
    w.flush().map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    Ok(())
}

pub fn write_labels_csv(path: &Path, ids: &IdMap, labels: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    w.write_record(["id", "component"])
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    for (i, label) in labels.iter().enumerate() {
        w.write_record([ids.id(i), &label.to_string()])
            .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    }
    w.flush().map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    Ok(())
}

/// Dense cohesion as `x,v,value` over all ordered pairs plus the diagonal.
pub fn write_dense_cohesion_csv(path: &Path, ids: &IdMap, c: &DenseCohesion) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    w.write_record(["x", "v", "value"])
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    for x in 0..c.n() {
        for v in 0..c.n() {
            w.write_record([ids.id(x), ids.id(v), &format!("{:.17e}", c.get(x, v))])
                .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
        }
    }
    w.flush().map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    Ok(())
}

/// Sparse cohesion as `x,v,value`: diagonal first, then promoted entries in
/// sorted order.
pub fn write_sparse_cohesion_csv(path: &Path, ids: &IdMap, c: &SparseCohesion) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    w.write_record(["x", "v", "value"])
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    for (x, &v) in c.diagonal().iter().enumerate() {
        w.write_record([ids.id(x), ids.id(x), &format!("{v:.17e}")])
            .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    }
    for (x, v, value) in c.sorted_entries() {
        w.write_record([ids.id(x), ids.id(v), &format!("{value:.17e}")])
            .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    }
    w.flush().map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    Ok(())
}

pub fn write_edges_csv(path: &Path, ids: &IdMap, edges: &[(usize, usize, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    w.write_record(["x", "y", "weight"])
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    for &(x, y, weight) in edges {
        w.write_record([ids.id(x), ids.id(y), &format!("{weight:.17e}")])
            .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    }
    w.flush().map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    Ok(())
}

/// Nearest-neighbor digraph arcs as `source,target`.
pub fn write_arcs_csv(
    path: &Path,
    ids: &IdMap,
    arcs: impl Iterator<Item = (usize, usize)>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    w.write_record(["source", "target"])
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    for (s, t) in arcs {
        w.write_record([ids.id(s), ids.id(t)])
            .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    }
    w.flush().map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    Ok(())
}

/// Promoted pairs as `x,y` (canonical order).
pub fn write_promoted_csv(path: &Path, ids: &IdMap, pairs: &[(usize, usize)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    w.write_record(["x", "y"])
        .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    for &(x, y) in pairs {
        w.write_record([ids.id(x), ids.id(y)])
            .map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    }
    w.flush().map_err(|e| csv_err(path, 0, None, e.to_string()))?;
    Ok(())
}
