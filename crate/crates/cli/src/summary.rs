//! The machine-readable run summary and its schema check.

use pannld_core::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub tau: f64,
    #[serde(rename = "tau_P")]
    pub tau_p: Option<f64>,
    #[serde(rename = "tau_R")]
    pub tau_r: Option<f64>,
    pub component_sizes: Vec<usize>,
    pub oracle_calls: u64,
    pub inner_steps: u64,
    pub wall_time: f64,
}

/// Field name, JSON type, nullability. The schema is part of the output
/// contract: integration tests validate every summary against it.
const SCHEMA: &[(&str, &str, bool)] = &[
    ("n", "number", false),
    ("K", "number", true),
    ("tau", "number", false),
    ("tau_P", "number", true),
    ("tau_R", "number", true),
    ("component_sizes", "array", false),
    ("oracle_calls", "number", false),
    ("inner_steps", "number", false),
    ("wall_time", "number", false),
];

pub fn validate_summary(value: &serde_json::Value) -> Result<()> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::InvalidInput("summary is not a JSON object".into()))?;
    for &(key, kind, nullable) in SCHEMA {
        let field = obj
            .get(key)
            .ok_or_else(|| Error::InvalidInput(format!("summary missing field {key:?}")))?;
        if field.is_null() {
            if nullable {
                continue;
            }
            return Err(Error::InvalidInput(format!(
                "summary field {key:?} may not be null"
            )));
        }
        let ok = match kind {
            "number" => field.is_number(),
            "array" => field.is_array(),
            _ => false,
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "summary field {key:?} should be a {kind}"
            )));
        }
    }
    for (key, _) in obj {
        if !SCHEMA.iter().any(|&(k, _, _)| k == key) {
            return Err(Error::InvalidInput(format!(
                "summary has unknown field {key:?}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_satisfies_its_own_schema() {
        let summary = Summary {
            n: 10,
            k: None,
            tau: 0.2,
            tau_p: None,
            tau_r: None,
            component_sizes: vec![7, 3],
            oracle_calls: 123,
            inner_steps: 456,
            wall_time: 0.01,
        };
        let value = serde_json::to_value(&summary).unwrap();
        validate_summary(&value).unwrap();
    }

    #[test]
    fn missing_field_detected() {
        let value = serde_json::json!({"n": 3});
        assert!(validate_summary(&value).is_err());
    }
}
