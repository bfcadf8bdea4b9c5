use serde::{Deserialize, Serialize};

use super::Wfa;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// On-disk layout: `{"alpha": [...], "transition": [[...], ...], "beta": [...]}`
/// with an optional free-text `comment`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WfaJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub alpha: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
}

impl WfaJson {
    pub fn into_wfa(self) -> Result<Wfa> {
        let n = self.transition.len();
        if let Some(row) = self.transition.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("transition has {n} rows but a row of length {}", row.len())));
        }
        let flat: Vec<f64> = self.transition.into_iter().flatten().collect();
        Wfa::new(Vector::from_vec(self.alpha), Matrix::from_row_slice(n, n, &flat), Vector::from_vec(self.beta))
    }

    pub fn from_wfa(w: &Wfa, comment: Option<String>) -> Self {
        Self {
            comment,
            alpha: w.alpha().iter().copied().collect(),
            transition: w.transition().row_iter().map(|r| r.iter().copied().collect()).collect(),
            beta: w.beta().iter().copied().collect(),
        }
    }
}

/// Parses an automaton. Out-of-range literals such as `1e999` are rejected.
pub fn from_json(text: &str) -> Result<Wfa> {
    let raw: WfaJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.into_wfa()
}

/// Pretty-printed JSON. Floats use the shortest representation that parses
/// back to the same bits.
pub fn to_json(w: &Wfa) -> String {
    serde_json::to_string_pretty(&WfaJson::from_wfa(w, None)).expect("finite floats always serialize")
}
