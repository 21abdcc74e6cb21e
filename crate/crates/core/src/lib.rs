// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Optimal control of surface-code defect operations.
//!
//! Stabilizer Hamiltonians are written as sums of Pauli strings
//! ([`pauli`]); a control problem interpolates `H(t) = H1 + f(t) H2` between
//! an initial and a final stabilizer set ([`problem`]). Piecewise-constant
//! pulses `f` are propagated exactly ([`propagation`]), scored against targets
//! produced by a slow linear ramp ([`fidelity`]), and optimized with exact
//! gradients and multi-start L-BFGS ([`grape`]). Problems with conserved
//! single-site operators are split into sector blocks ([`symmetry`]), and
//! [`harness`] drives sweeps and writes result files.

pub mod error;
pub mod fidelity;
pub mod grape;
pub mod harness;
pub mod lbfgs;
pub mod linalg;
pub mod parallel;
pub mod pauli;
pub mod problem;
pub mod propagation;
pub mod subspace;
pub mod symmetry;

pub use error::{Error, Result};
pub use grape::{optimize, optimize_until, prepare_objective, Objective, OptimizationReport, OptimizerConfig};
pub use lbfgs::ExitReason;
pub use parallel::Execution;
pub use pauli::{Axis, OperatorSum, PauliTerm};
pub use problem::{load_problem, preset, ControlProblem, ObjectiveKind, TargetSpec};
pub use propagation::{linear_ramp, Propagator, Pulse};
pub use symmetry::{block_decompose, equivalence_classes, BlockEnsemble, SectorBlock};
