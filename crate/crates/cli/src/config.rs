//! Run configuration: everything a batch run needs, fully serializable so a
//! persisted config reproduces the run bit-identically on the same build.

use std::path::{Path, PathBuf};

use pannld_core::error::{Error, Result};
use pannld_core::io::{self, IdMap};
use pannld_core::ranking::{DatasetSpec, RankingSystem};
use pannld_core::PhiMode;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum InputSpec {
    Points { path: PathBuf },
    Distances { path: PathBuf },
    Ranks { path: PathBuf },
    Generator { spec: DatasetSpec },
}

impl InputSpec {
    /// Materialize the ranking system and its id map.
    pub fn load(&self) -> Result<(IdMap, RankingSystem)> {
        match self {
            InputSpec::Points { path } => {
                let (ids, coords) = io::read_points_csv(path)?;
                Ok((ids, RankingSystem::from_points(&coords)?))
            }
            InputSpec::Distances { path } => {
                let (ids, rows) = io::read_dissimilarity_csv(path)?;
                Ok((ids, RankingSystem::from_dissimilarity(&rows)?))
            }
            InputSpec::Ranks { path } => io::read_rank_tables_csv(path),
            InputSpec::Generator { spec } => {
                let rs = spec.build()?;
                Ok((IdMap::numbered(rs.n()), rs))
            }
        }
    }
}

/// Parse the compact generator syntax, e.g.
/// `euclidean:n=400,dim=2,seed=7`, `star:leaves=200`,
/// `tournament:n=50,seed=3`.
pub fn parse_generator_spec(text: &str) -> Result<DatasetSpec> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut params = std::collections::HashMap::new();
    for part in rest.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!("generator parameter {part:?} is not key=value"))
        })?;
        params.insert(key.trim().to_string(), value.trim().to_string());
    }
    let get_usize = |params: &std::collections::HashMap<String, String>, key: &str| -> Result<usize> {
        params
            .get(key)
            .ok_or_else(|| Error::InvalidInput(format!("generator {kind} needs {key}=")))?
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad {key}: {e}")))
    };
    let get_seed = |params: &std::collections::HashMap<String, String>| -> Result<u64> {
        params
            .get("seed")
            .map(|s| {
                s.parse()
                    .map_err(|e| Error::InvalidInput(format!("bad seed: {e}")))
            })
            .unwrap_or(Ok(0))
    };
    match kind {
        "euclidean" => Ok(DatasetSpec::Euclidean {
            n: get_usize(&params, "n")?,
            dim: get_usize(&params, "dim").unwrap_or(2),
            seed: get_seed(&params)?,
        }),
        "star" => Ok(DatasetSpec::Star {
            leaves: get_usize(&params, "leaves")?,
            weights: None,
        }),
        "tournament" => Ok(DatasetSpec::RandomTournament {
            n: get_usize(&params, "n")?,
            seed: get_seed(&params)?,
        }),
        other => Err(Error::InvalidInput(format!(
            "unknown generator kind {other:?} (expected euclidean|star|tournament)"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Pald,
    Pannld,
}

/// One batch run, ready to serialize next to its artifacts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSpec,
    pub pipeline: Pipeline,
    /// Friend-set size; required for the approximate pipeline.
    pub k: Option<usize>,
    pub phi_mode: PhiMode,
    /// Root seed; generator inputs and verification checks derive all
    /// randomness from it.
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Promoted-degree cap; None picks the built-in default.
    pub degree_cap: Option<usize>,
    /// Worker-thread budget; None uses every core.
    pub threads: Option<usize>,
    /// Refusal cap for the exact cubic pipeline.
    pub pald_cap: usize,
    /// Run the exact pipeline even above the cap.
    pub force: bool,
}

impl RunConfig {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Inconsistency(format!("config serialization: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("bad config {}: {e}", path.display())))
    }
}
