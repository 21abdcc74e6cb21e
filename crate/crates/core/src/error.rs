// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the control library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dense realization of {n_qubits} qubits exceeds the {max}-qubit guard")]
    Size { n_qubits: usize, max: usize },

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("unknown preset `{name}`; available presets: {}", available.join(", "))]
    UnknownPreset {
        name: String,
        available: Vec<&'static str>,
    },

    #[error("projection annihilates the reference state; choose a different reference")]
    DegenerateReference,

    #[error("adiabatic target misses the final ground energy by {residual:.3e} (tolerance {tolerance:.1e})")]
    AdiabaticityFailure { residual: f64, tolerance: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("non-Hermitian coefficient at {location}: imaginary part {imaginary}")]
    NonHermitian { location: String, imaginary: f64 },

    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("unknown output format `{0}` (expected csv or json)")]
    UnknownFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
