// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise-constant evolution under `H1 + f(t) H2`.
//!
//! Segments are exponentiated exactly through a Hermitian eigendecomposition.
//! A Taylor-series integrator that never forms a matrix is provided for
//! registers too large for the dense path and as an independent check.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::linalg::{hermiticity_defect, unitarity_defect, CMatrix, CVector, HermitianEigen, C64, I};
use crate::pauli::{OperatorSum, MAX_DENSE_QUBITS};
use crate::problem::{ControlProblem, ObjectiveKind, TargetSpec};
use crate::subspace::{compress, invariant_decomposition, krylov_closure};

/// Hermiticity defect tolerated in dense Hamiltonians.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Energy error allowed for an adiabatic target state.
pub const ADIABATIC_ENERGY_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub duration: f64,
    pub amplitudes: Vec<f64>,
}

impl Pulse {
    pub fn new(duration: f64, amplitudes: Vec<f64>) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(validation(format!("pulse duration must be positive, got {duration}")));
        }
        if amplitudes.is_empty() {
            return Err(validation("pulse needs at least one segment"));
        }
        if let Some(k) = amplitudes.iter().position(|f| !f.is_finite()) {
            return Err(validation(format!("amplitude {k} is not finite")));
        }
        Ok(Self {
            duration,
            amplitudes,
        })
    }

    /// All-zero pulse.
    pub fn zeros(duration: f64, segments: usize) -> Result<Self> {
        Self::new(duration, vec![0.0; segments])
    }

    pub fn segments(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn dt(&self) -> f64 {
        self.duration / self.amplitudes.len() as f64
    }

    pub fn max_abs_amplitude(&self) -> f64 {
        self.amplitudes.iter().fold(0.0, |m, f| m.max(f.abs()))
    }

    /// Splits every segment into `factor` equal segments of the same amplitude.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(validation("refinement factor must be positive"));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&f| std::iter::repeat_n(f, factor))
            .collect();
        Self::new(self.duration, amplitudes)
    }

    /// The first `k` segments and the rest, as two pulses.
    pub fn split_at(&self, k: usize) -> Result<(Self, Self)> {
        if k == 0 || k >= self.segments() {
            return Err(validation(format!(
                "split point {k} must lie strictly inside 0..{}",
                self.segments()
            )));
        }
        let dt = self.dt();
        let head = Self::new(dt * k as f64, self.amplitudes[..k].to_vec())?;
        let tail = Self::new(dt * (self.segments() - k) as f64, self.amplitudes[k..].to_vec())?;
        Ok((head, tail))
    }

    /// Same segments in reverse order.
    pub fn reversed(&self) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.reverse();
        Self {
            duration: self.duration,
            amplitudes,
        }
    }
}

/// The baseline ramp `f(t) = t/T`, sampled at segment midpoints.
pub fn linear_ramp(duration: f64, segments: usize) -> Result<Pulse> {
    let n = segments as f64;
    Pulse::new(duration, (0..segments).map(|k| (k as f64 + 0.5) / n).collect())
}

/// A time-ordered product of segment exponentials.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub unitary: CMatrix,
    pub duration: f64,
    pub segments: usize,
}

impl Propagator {
    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.unitary)
    }
}

fn check_pair(h1: &CMatrix, h2: &CMatrix) -> Result<()> {
    if !h1.is_square() || h1.shape() != h2.shape() {
        return Err(validation(format!(
            "drift {:?} and control {:?} must be square and of equal size",
            h1.shape(),
            h2.shape()
        )));
    }
    for (name, h) in [("drift", h1), ("control", h2)] {
        let defect = hermiticity_defect(h);
        if defect > HERMITICITY_TOLERANCE {
            return Err(validation(format!("{name} is not Hermitian (defect {defect:.3e})")));
        }
    }
    Ok(())
}

/// `H1 + f H2`.
pub fn segment_hamiltonian(h1: &CMatrix, h2: &CMatrix, f: f64) -> CMatrix {
    h1 + h2 * C64::new(f, 0.0)
}

/// `exp(-i (H1 + f H2) dt)`.
pub fn segment_unitary(h1: &CMatrix, h2: &CMatrix, f: f64, dt: f64) -> Result<CMatrix> {
    check_pair(h1, h2)?;
    Ok(HermitianEigen::new(&segment_hamiltonian(h1, h2, f)).exp_neg_i(dt))
}

/// `U_N ⋯ U_1` for dense drift and control matrices.
pub fn propagate_dense(h1: &CMatrix, h2: &CMatrix, pulse: &Pulse) -> Result<Propagator> {
    check_pair(h1, h2)?;
    let dt = pulse.dt();
    let dim = h1.nrows();
    let mut u = CMatrix::identity(dim, dim);
    for &f in &pulse.amplitudes {
        let step = HermitianEigen::new(&segment_hamiltonian(h1, h2, f)).exp_neg_i(dt);
        u = step * u;
    }
    Ok(Propagator {
        unitary: u,
        duration: pulse.duration,
        segments: pulse.segments(),
    })
}

/// `U_N ⋯ U_1 |psi>` without forming the product.
pub fn evolve_dense(h1: &CMatrix, h2: &CMatrix, pulse: &Pulse, psi: &CVector) -> Result<CVector> {
    check_pair(h1, h2)?;
    if psi.len() != h1.nrows() {
        return Err(validation(format!(
            "state of length {} does not match dimension {}",
            psi.len(),
            h1.nrows()
        )));
    }
    let dt = pulse.dt();
    let mut out = psi.clone();
    for &f in &pulse.amplitudes {
        out = HermitianEigen::new(&segment_hamiltonian(h1, h2, f)).apply_exp_neg_i(dt, &out);
    }
    Ok(out)
}

/// Dense drift and control of a problem.
pub fn realize_pair(problem: &ControlProblem) -> Result<(CMatrix, CMatrix)> {
    Ok((problem.drift.realize()?, problem.control.realize()?))
}

/// Full-register propagator of a problem.
pub fn propagate(problem: &ControlProblem, pulse: &Pulse) -> Result<Propagator> {
    let (h1, h2) = realize_pair(problem)?;
    propagate_dense(&h1, &h2, pulse)
}

/// Matrix-free evolution by a substepped Taylor series of each segment.
pub fn apply_to_state(problem: &ControlProblem, pulse: &Pulse, state: &CVector) -> Result<CVector> {
    let n = problem.n_qubits();
    if n >= usize::BITS as usize || state.len() != 1usize << n {
        return Err(validation(format!(
            "state of length {} does not match {n} qubits",
            state.len()
        )));
    }
    let dt = pulse.dt();
    let mut psi = state.clone();
    for &f in &pulse.amplitudes {
        let h = problem
            .drift
            .plus(&problem.control.scaled(f), 0.0)?;
        psi = taylor_step(&h, dt, &psi)?;
    }
    Ok(psi)
}

fn taylor_step(h: &OperatorSum, dt: f64, psi: &CVector) -> Result<CVector> {
    // keep ||H|| τ ≤ 1/2 so the series converges in a few dozen terms
    let substeps = ((h.norm_bound() * dt.abs()) / 0.5).ceil().max(1.0) as usize;
    let tau = dt / substeps as f64;
    let mut out = psi.clone();
    for _ in 0..substeps {
        let mut term = out.clone();
        let mut sum = out.clone();
        for j in 1..=60 {
            term = h.apply(&term)? * (-I * (tau / j as f64));
            sum += &term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        out = sum;
    }
    Ok(out)
}

/// The propagator of the slow linear ramp, used as a gate target.
///
/// Each subspace invariant under both Hamiltonians is propagated on its own
/// and the pieces are summed as `Σ Q U_Q Q†`.
pub fn adiabatic_target_unitary(h1: &CMatrix, h2: &CMatrix, t_adiabatic: f64, n_adiabatic: usize) -> Result<Propagator> {
    check_pair(h1, h2)?;
    let ramp = linear_ramp(t_adiabatic, n_adiabatic)?;
    let dim = h1.nrows();
    let mut unitary = CMatrix::zeros(dim, dim);
    for q in invariant_decomposition(&[h1, h2]) {
        let part = propagate_dense(&compress(h1, &q), &compress(h2, &q), &ramp)?;
        unitary += &q * part.unitary * q.adjoint();
    }
    Ok(Propagator {
        unitary,
        duration: ramp.duration,
        segments: ramp.segments(),
    })
}

/// A state-transfer problem compressed onto the closure of its initial state.
///
/// The columns of `basis` span the smallest subspace containing the initial
/// state that both Hamiltonians leave invariant, so every evolution of the
/// initial state stays inside it.
#[derive(Debug, Clone)]
pub struct ReducedStateProblem {
    pub basis: CMatrix,
    pub drift: CMatrix,
    pub control: CMatrix,
    pub initial: CVector,
    pub target: CVector,
}

impl ReducedStateProblem {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The target in the full register.
    pub fn full_target(&self) -> CVector {
        &self.basis * &self.target
    }

    pub fn full_initial(&self) -> CVector {
        &self.basis * &self.initial
    }
}

/// Compresses a state-transfer problem and evolves its initial state along
/// the linear ramp, checking that the final Hamiltonian's ground energy is
/// reached.
pub fn reduce_state_problem(problem: &ControlProblem, spec: &TargetSpec) -> Result<ReducedStateProblem> {
    if problem.objective != ObjectiveKind::StateTransfer {
        return Err(Error::Configuration(format!(
            "problem '{}' is not a state-transfer problem",
            problem.name
        )));
    }
    spec.validate()?;
    if problem.n_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::Size {
            n_qubits: problem.n_qubits(),
            max: MAX_DENSE_QUBITS,
        });
    }
    let g1 = problem.initial_vector()?;
    let (h1, h2) = realize_pair(problem)?;
    let basis = krylov_closure(&[&h1, &h2], &g1);
    let drift = compress(&h1, &basis);
    let control = compress(&h2, &basis);
    let initial = basis.ad_mul(&g1);
    let ramp = linear_ramp(spec.t_adiabatic, spec.n_adiabatic)?;
    let target = evolve_dense(&drift, &control, &ramp, &initial)?;

    let hf = &h1 + &h2;
    let full = &basis * &target;
    let energy = full.dotc(&(&hf * &full)).re;
    let ground = HermitianEigen::new(&hf).values[0];
    let residual = energy - ground;
    if residual.abs() > ADIABATIC_ENERGY_TOLERANCE {
        return Err(Error::AdiabaticityFailure {
            residual,
            tolerance: ADIABATIC_ENERGY_TOLERANCE,
        });
    }
    Ok(ReducedStateProblem {
        basis,
        drift,
        control,
        initial,
        target,
    })
}

/// `U(ramp) |g1>` for the linear ramp of `spec`, in the full register.
pub fn adiabatic_target_state(problem: &ControlProblem, spec: &TargetSpec) -> Result<CVector> {
    Ok(reduce_state_problem(problem, spec)?.full_target())
}
