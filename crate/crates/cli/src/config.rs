//! Custom observable/state documents.
//!
//! ```json
//! {
//!   "observables": [{"name": "S_z", "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]}],
//!   "states": [{"name": "up", "vector": [[1, 0], [0, 0]]}]
//! }
//! ```
//!
//! Complex entries are always `[re, im]` pairs.

use serde::{Deserialize, Serialize};
use uncertlab_core::linalg::{norm, Matrix};
use uncertlab_core::{Complex64, HermitianObservable, QuantumState, Tolerances};

/// States whose norm falls in this range are rescaled with a warning.
pub const AUTO_NORMALIZE: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub observables: Vec<RawObservable>,
    #[serde(default)]
    pub states: Vec<RawState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawObservable {
    pub name: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawState {
    pub name: String,
    pub vector: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("observables[{index}] ({name}) is not Hermitian: entry ({row}, {col}) differs from the conjugate of ({col}, {row}) by {defect:e}")]
    NotHermitian { index: usize, name: String, row: usize, col: usize, defect: f64 },
    #[error("states[{index}] ({name}) has norm {norm}, outside [{}, {}]", AUTO_NORMALIZE.0, AUTO_NORMALIZE.1)]
    BadNorm { index: usize, name: String, norm: f64 },
}

#[derive(Debug, Clone)]
pub struct Config {
    pub raw: RawConfig,
    pub observables: Vec<(String, HermitianObservable)>,
    pub states: Vec<(String, QuantumState)>,
    pub warnings: Vec<String>,
}

fn field(field: String, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

fn complex(pair: &[f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

pub fn parse_config(text: &str, tol: &Tolerances) -> Result<Config, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.observables.is_empty() {
        return Err(field("observables".into(), "at least one observable is required"));
    }
    let mut names = std::collections::BTreeSet::new();
    let mut dim = None;
    let mut observables = Vec::new();
    for (index, o) in raw.observables.iter().enumerate() {
        let path = format!("observables[{index}]");
        if !names.insert(o.name.clone()) {
            return Err(field(format!("{path}.name"), format!("duplicate name {:?}", o.name)));
        }
        let n = o.matrix.len();
        if n == 0 {
            return Err(field(format!("{path}.matrix"), "empty matrix"));
        }
        if let Some(r) = o.matrix.iter().position(|row| row.len() != n) {
            return Err(field(
                format!("{path}.matrix[{r}]"),
                format!("expected {n} entries, found {}", o.matrix[r].len()),
            ));
        }
        if *dim.get_or_insert(n) != n {
            return Err(field(format!("{path}.matrix"), format!("dimension {n} differs from {}", dim.unwrap())));
        }
        let rows: Vec<Vec<Complex64>> = o.matrix.iter().map(|row| row.iter().map(complex).collect()).collect();
        let m = Matrix::from_rows(rows).map_err(|e| field(format!("{path}.matrix"), e.to_string()))?;
        let (defect, row, col) = m.hermitian_defect();
        if defect > tol.hermitian {
            return Err(ConfigError::NotHermitian { index, name: o.name.clone(), row, col, defect });
        }
        let obs = HermitianObservable::new(m, tol)
            .map_err(|e| field(format!("{path}.matrix"), e.to_string()))?
            .named(&o.name);
        observables.push((o.name.clone(), obs));
    }
    let dim = dim.unwrap_or(0);

    let mut warnings = Vec::new();
    let mut states = Vec::new();
    names.clear();
    for (index, st) in raw.states.iter().enumerate() {
        let path = format!("states[{index}]");
        if !names.insert(st.name.clone()) {
            return Err(field(format!("{path}.name"), format!("duplicate name {:?}", st.name)));
        }
        if st.vector.len() != dim {
            return Err(field(format!("{path}.vector"), format!("expected {dim} entries, found {}", st.vector.len())));
        }
        if let Some(k) = st.vector.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(field(format!("{path}.vector[{k}]"), "non-finite entry"));
        }
        let amps: Vec<Complex64> = st.vector.iter().map(complex).collect();
        let nrm = norm(&amps);
        if !(AUTO_NORMALIZE.0..=AUTO_NORMALIZE.1).contains(&nrm) {
            return Err(ConfigError::BadNorm { index, name: st.name.clone(), norm: nrm });
        }
        if (nrm - 1.0).abs() > tol.normalization {
            warnings.push(format!("{path} ({}) had norm {nrm}; normalized", st.name));
        }
        let v = QuantumState::normalized(amps).map_err(|e| field(format!("{path}.vector"), e.to_string()))?;
        states.push((st.name.clone(), v));
    }
    Ok(Config { raw, observables, states, warnings })
}
