// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Figures of merit. Optimizers minimize `1 - fidelity`.
//!
//! The gate fidelity is the trace-overlap magnitude `|Tr(V† U)| / d`, not its
//! square; the state fidelity is the squared overlap.

use crate::error::{validation, Result};
use crate::linalg::{trace_adjoint_product, CMatrix, CVector, C64};

/// Allowed deviation of a state from unit norm.
pub const STATE_NORM_TOLERANCE: f64 = 1e-8;

fn check_unit(name: &str, psi: &CVector) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > STATE_NORM_TOLERANCE {
        return Err(validation(format!("{name} has norm {norm}, expected 1")));
    }
    Ok(())
}

fn check_square_pair(u: &CMatrix, v: &CMatrix) -> Result<()> {
    if !u.is_square() || u.shape() != v.shape() {
        return Err(validation(format!(
            "operators of shape {:?} and {:?} cannot be compared",
            u.shape(),
            v.shape()
        )));
    }
    Ok(())
}

/// `|<target|U|initial>|²`.
pub fn state_fidelity(u: &CMatrix, initial: &CVector, target: &CVector) -> Result<f64> {
    check_unit("initial state", initial)?;
    check_unit("target state", target)?;
    if u.ncols() != initial.len() || u.nrows() != target.len() {
        return Err(validation("state and propagator dimensions differ"));
    }
    Ok(overlap_fidelity(&(u * initial), target))
}

/// `|<target|psi>|²` for an already evolved state.
pub fn overlap_fidelity(evolved: &CVector, target: &CVector) -> f64 {
    target.dotc(evolved).norm_sqr()
}

/// `Tr(U† V) / d`.
pub fn phase_sensitive_fidelity(u: &CMatrix, v: &CMatrix) -> Result<C64> {
    check_square_pair(u, v)?;
    Ok(trace_adjoint_product(u, v) / u.nrows() as f64)
}

/// `|Tr(V† U)| / d`.
pub fn gate_fidelity(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    Ok(phase_sensitive_fidelity(u, v)?.norm())
}

/// `|Σ_j w_j F̃(U_j, V_j)| / Σ_j w_j`: the gate fidelity of a direct sum of
/// equally sized blocks, where `w_j` counts the sectors sharing block `j`.
pub fn ensemble_fidelity(pairs: &[(&CMatrix, &CMatrix)], weights: &[u64]) -> Result<f64> {
    Ok(ensemble_overlap(pairs, weights)?.norm())
}

/// The complex weighted average inside [`ensemble_fidelity`].
pub fn ensemble_overlap(pairs: &[(&CMatrix, &CMatrix)], weights: &[u64]) -> Result<C64> {
    if pairs.is_empty() {
        return Err(validation("ensemble is empty"));
    }
    if pairs.len() != weights.len() {
        return Err(validation(format!(
            "{} blocks but {} weights",
            pairs.len(),
            weights.len()
        )));
    }
    if weights.contains(&0) {
        return Err(validation("ensemble weights must be positive"));
    }
    let total: u64 = weights.iter().sum();
    let mut sum = C64::new(0.0, 0.0);
    for ((u, v), &w) in pairs.iter().zip(weights) {
        sum += phase_sensitive_fidelity(u, v)? * w as f64;
    }
    Ok(sum / total as f64)
}
