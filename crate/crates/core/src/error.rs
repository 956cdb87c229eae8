use std::fmt;

use thiserror::Error;

/// The four oracle axioms a ranking system must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    Antisymmetry,
    Transitivity,
    Totality,
    Autosimilarity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::Antisymmetry => "antisymmetry",
            Axiom::Transitivity => "transitivity",
            Axiom::Totality => "totality",
            Axiom::Autosimilarity => "autosimilarity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An oracle answered inconsistently with the axioms; the witness triple
    /// is reported as (x; y, z), i.e. base point first.
    #[error("{axiom} violated at triple (x={x}; y={y}, z={z})")]
    AxiomViolation {
        axiom: Axiom,
        x: usize,
        y: usize,
        z: usize,
    },

    /// Promoted-graph degree exceeds the configured cap; `vertices` holds
    /// (vertex, degree) for the offenders, worst first.
    #[error("degree cap {cap} exceeded by {} vertex(es): {}", vertices.len(), format_offenders(vertices))]
    DegreeCapExceeded {
        cap: usize,
        vertices: Vec<(usize, usize)>,
    },

    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error("malformed csv {path}: row {row}{}: {msg}", col.map(|c| format!(", column {c}")).unwrap_or_default())]
    Csv {
        path: String,
        row: usize,
        col: Option<usize>,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_offenders(vertices: &[(usize, usize)]) -> String {
    let shown: Vec<String> = vertices
        .iter()
        .take(8)
        .map(|(v, d)| format!("{v} (degree {d})"))
        .collect();
    let mut s = shown.join(", ");
    if vertices.len() > 8 {
        s.push_str(", ...");
    }
    s
}

pub type Result<T> = std::result::Result<T, Error>;
