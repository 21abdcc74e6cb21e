// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Pulse optimization with exact gradients and seeded multi-start descent.
//!
//! The derivative of a segment exponential `exp(-i H dt)` with respect to its
//! amplitude is taken in the eigenbasis of `H`: with `H = W Λ W†` and
//! `K = W† H2 W`, it equals `W (G ∘ K) W†` where
//! `G_mn = -i dt exp(-i (λ_m + λ_n) dt / 2) sinc((λ_m - λ_n) dt / 2)`.
//! Forward and backward propagator products then give every component of
//! the gradient in one sweep.

use std::time::Instant;

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::lbfgs::{self, ExitReason, LbfgsConfig};
use crate::linalg::{phase, trace_adjoint_product, CMatrix, CVector, HermitianEigen, C64, I};
use crate::parallel::{map_indexed, Execution};
use crate::problem::{ControlProblem, ObjectiveKind};
use crate::propagation::{adiabatic_target_unitary, evolve_dense, realize_pair, reduce_state_problem, segment_hamiltonian, Pulse};
use crate::subspace::{compress, invariant_decomposition};
use crate::symmetry::{block_decompose, symmetry_sites, BlockEnsemble};

/// One term `weight · Tr(U† V)` of a trace objective, on a subspace that the
/// drift and control leave invariant.
#[derive(Debug, Clone)]
pub struct Channel {
    pub weight: f64,
    pub drift: CMatrix,
    pub control: CMatrix,
    pub target: CMatrix,
}

/// A prepared figure of merit; `infidelity` is what the optimizer minimizes.
#[derive(Debug, Clone)]
pub enum Objective {
    /// `1 - |<target|U|initial>|²`.
    State {
        drift: CMatrix,
        control: CMatrix,
        initial: CVector,
        target: CVector,
    },
    /// `1 - |Σ_c weight_c Tr(U_c† V_c)|`.
    Trace { channels: Vec<Channel> },
}

impl Objective {
    /// A gate objective `1 - |Tr(V† U)|/d` for dense drift, control and target.
    pub fn gate(drift: &CMatrix, control: &CMatrix, target: &CMatrix) -> Result<Self> {
        let d = drift.nrows();
        if target.shape() != (d, d) {
            return Err(validation("target and Hamiltonian dimensions differ"));
        }
        let mut channels = Vec::new();
        push_channels(&mut channels, 1.0 / d as f64, drift, control, target);
        Ok(Objective::Trace { channels })
    }

    /// The ensemble objective of a block decomposition with attached targets.
    pub fn ensemble(ensemble: &BlockEnsemble) -> Result<Self> {
        let total: u64 = ensemble.blocks.iter().map(|b| b.multiplicity).sum();
        let mut channels = Vec::new();
        for (j, block) in ensemble.blocks.iter().enumerate() {
            let target = block.target.as_ref().ok_or_else(|| {
                Error::Configuration(format!("block {j} has no target unitary"))
            })?;
            let drift = block.drift.realize()?;
            let control = block.control.realize()?;
            let weight = block.multiplicity as f64 / (total as f64 * drift.nrows() as f64);
            push_channels(&mut channels, weight, &drift, &control, target);
        }
        Ok(Objective::Trace { channels })
    }

    /// Largest matrix dimension the objective works with.
    pub fn working_dim(&self) -> usize {
        match self {
            Objective::State { drift, .. } => drift.nrows(),
            Objective::Trace { channels } => channels.iter().map(|c| c.drift.nrows()).max().unwrap_or(0),
        }
    }

    pub fn infidelity(&self, pulse: &Pulse) -> f64 {
        match self {
            Objective::State {
                drift,
                control,
                initial,
                target,
            } => {
                let out = evolve_dense(drift, control, pulse, initial).expect("objective matrices were validated");
                1.0 - target.dotc(&out).norm_sqr()
            }
            Objective::Trace { channels } => {
                let mut sum = C64::new(0.0, 0.0);
                for c in channels {
                    let u = crate::propagation::propagate_dense(&c.drift, &c.control, pulse)
                        .expect("objective matrices were validated");
                    sum += trace_adjoint_product(&u.unitary, &c.target) * c.weight;
                }
                1.0 - sum.norm()
            }
        }
    }

    /// Infidelity and its exact gradient with respect to every amplitude.
    pub fn infidelity_and_gradient(&self, pulse: &Pulse) -> (f64, Vec<f64>) {
        let dt = pulse.dt();
        let n = pulse.segments();
        match self {
            Objective::State {
                drift,
                control,
                initial,
                target,
            } => {
                let eigs = segment_eigs(drift, control, &pulse.amplitudes);
                let mut forward = Vec::with_capacity(n + 1);
                forward.push(initial.clone());
                for e in &eigs {
                    let next = e.apply_exp_neg_i(dt, forward.last().expect("nonempty"));
                    forward.push(next);
                }
                let overlap = target.dotc(&forward[n]);
                let mut grad = vec![0.0; n];
                let mut back = target.clone();
                for k in (0..n).rev() {
                    let e = &eigs[k];
                    let kernel = derivative_kernel(e, control, dt);
                    let a = e.vectors.ad_mul(&forward[k]);
                    let b = e.vectors.ad_mul(&back);
                    let d_overlap = b.dotc(&(kernel * a));
                    grad[k] = -2.0 * (overlap.conj() * d_overlap).re;
                    // back ← U_k† back
                    back = e.apply_exp_neg_i(-dt, &back);
                }
                (1.0 - overlap.norm_sqr(), grad)
            }
            Objective::Trace { channels } => {
                let mut sum = C64::new(0.0, 0.0);
                let mut d_sum = vec![C64::new(0.0, 0.0); n];
                for c in channels {
                    channel_overlap(c, pulse, &mut sum, &mut d_sum);
                }
                let magnitude = sum.norm();
                let grad = if magnitude > 0.0 {
                    d_sum
                        .iter()
                        .map(|d| -(sum.conj() * d).re / magnitude)
                        .collect()
                } else {
                    vec![0.0; n]
                };
                (1.0 - magnitude, grad)
            }
        }
    }
}

/// Channels whose matrices agree entrywise to this are merged by summing
/// their weights.
pub const CHANNEL_MERGE_TOLERANCE: f64 = 1e-13;

fn push_channels(out: &mut Vec<Channel>, weight: f64, drift: &CMatrix, control: &CMatrix, target: &CMatrix) {
    for q in invariant_decomposition(&[drift, control]) {
        let channel = Channel {
            weight,
            drift: compress(drift, &q),
            control: compress(control, &q),
            target: compress(target, &q),
        };
        match out.iter_mut().find(|c| same_channel(c, &channel)) {
            Some(c) => c.weight += weight,
            None => out.push(channel),
        }
    }
}

fn same_channel(a: &Channel, b: &Channel) -> bool {
    let close = |x: &CMatrix, y: &CMatrix| {
        x.shape() == y.shape() && x.iter().zip(y.iter()).all(|(p, q)| (p - q).norm() <= CHANNEL_MERGE_TOLERANCE)
    };
    close(&a.drift, &b.drift) && close(&a.control, &b.control) && close(&a.target, &b.target)
}

fn segment_eigs(drift: &CMatrix, control: &CMatrix, amplitudes: &[f64]) -> Vec<HermitianEigen> {
    amplitudes
        .iter()
        .map(|&f| HermitianEigen::new(&segment_hamiltonian(drift, control, f)))
        .collect()
}

/// `G ∘ (W† H2 W)` for one segment.
fn derivative_kernel(e: &HermitianEigen, control: &CMatrix, dt: f64) -> CMatrix {
    let k = e.vectors.ad_mul(&(control * &e.vectors));
    let d = e.dim();
    CMatrix::from_fn(d, d, |m, n| {
        let (lm, ln) = (e.values[m], e.values[n]);
        let x = 0.5 * (lm - ln) * dt;
        let sinc = if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
        C64::new(0.0, -dt) * phase(-0.5 * (lm + ln) * dt) * sinc * k[(m, n)]
    })
}

/// Adds `weight · Tr(U† V)` and its amplitude derivatives to the sums.
fn channel_overlap(c: &Channel, pulse: &Pulse, sum: &mut C64, d_sum: &mut [C64]) {
    match c.drift.nrows() {
        1 => scalar_channel(c, pulse, sum, d_sum),
        2 => qubit_channel(c, pulse, sum, d_sum),
        _ => dense_channel(c, pulse, sum, d_sum),
    }
}

fn dense_channel(c: &Channel, pulse: &Pulse, sum: &mut C64, d_sum: &mut [C64]) {
    let dt = pulse.dt();
    let n = pulse.segments();
    let d = c.drift.nrows();
    let eigs = segment_eigs(&c.drift, &c.control, &pulse.amplitudes);
    let steps: Vec<CMatrix> = eigs.iter().map(|e| e.exp_neg_i(dt)).collect();
    // before[k] = U_{k-1} ⋯ U_0
    let mut before = Vec::with_capacity(n + 1);
    before.push(CMatrix::identity(d, d));
    for u in &steps {
        let next = u * before.last().expect("nonempty");
        before.push(next);
    }
    *sum += trace_adjoint_product(&before[n], &c.target) * c.weight;

    // after = V† U_{N-1} ⋯ U_{k+1}
    let mut after = c.target.adjoint();
    for k in (0..n).rev() {
        let e = &eigs[k];
        let m = &before[k] * &after;
        let mt = e.vectors.ad_mul(&(m * &e.vectors));
        let kernel = derivative_kernel(e, &c.control, dt);
        // Tr(M W (G∘K) W†) = Σ_mn Mt_nm (G∘K)_mn
        let tr: C64 = mt.transpose().iter().zip(kernel.iter()).map(|(a, b)| a * b).sum();
        d_sum[k] += tr.conj() * c.weight;
        after = &after * &steps[k];
    }
}

/// One-dimensional channel: every segment is a phase.
fn scalar_channel(c: &Channel, pulse: &Pulse, sum: &mut C64, d_sum: &mut [C64]) {
    let dt = pulse.dt();
    let (a, b) = (c.drift[(0, 0)].re, c.control[(0, 0)].re);
    let angle: f64 = pulse.amplitudes.iter().map(|f| (a + f * b) * dt).sum();
    // Tr(U† V) = e^{i angle} V, and each amplitude shifts the angle by b dt
    let overlap = phase(angle) * c.target[(0, 0)];
    *sum += overlap * c.weight;
    for d in d_sum.iter_mut() {
        *d += I * (b * dt) * overlap * c.weight;
    }
}

type M2 = Matrix2<C64>;

/// Closed-form eigendecomposition of a 2×2 Hermitian matrix, ascending.
fn eig2(h: &M2) -> ([f64; 2], M2) {
    let (a, d, b) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    if r == 0.0 {
        return ([mean, mean], M2::identity());
    }
    // eigenvector of the upper eigenvalue, built from whichever row is well conditioned
    let (x, y) = if half >= 0.0 {
        (C64::new(half + r, 0.0), b.conj())
    } else {
        (b, C64::new(r - half, 0.0))
    };
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let (x, y) = (x / norm, y / norm);
    let w = M2::new(-y.conj(), x, x.conj(), y);
    ([mean - r, mean + r], w)
}

fn qubit_channel(c: &Channel, pulse: &Pulse, sum: &mut C64, d_sum: &mut [C64]) {
    let dt = pulse.dt();
    let n = pulse.segments();
    let h1: M2 = c.drift.fixed_view::<2, 2>(0, 0).into_owned();
    let h2: M2 = c.control.fixed_view::<2, 2>(0, 0).into_owned();
    let v: M2 = c.target.fixed_view::<2, 2>(0, 0).into_owned();
    let eigs: Vec<([f64; 2], M2)> = pulse
        .amplitudes
        .iter()
        .map(|&f| eig2(&(h1 + h2 * C64::new(f, 0.0))))
        .collect();
    let steps: Vec<M2> = eigs
        .iter()
        .map(|(l, w)| {
            let p = M2::from_diagonal(&Vector2::new(phase(-l[0] * dt), phase(-l[1] * dt)));
            w * p * w.adjoint()
        })
        .collect();
    let mut before = Vec::with_capacity(n + 1);
    before.push(M2::identity());
    for u in &steps {
        let next = u * before.last().expect("nonempty");
        before.push(next);
    }
    let total = before[n];
    *sum += total.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum::<C64>() * c.weight;

    let mut after = v.adjoint();
    for k in (0..n).rev() {
        let (l, w) = &eigs[k];
        let mt = w.adjoint() * before[k] * after * w;
        let kk = w.adjoint() * h2 * w;
        let mut tr = C64::new(0.0, 0.0);
        for m in 0..2 {
            for q in 0..2 {
                let x = 0.5 * (l[m] - l[q]) * dt;
                let sinc = if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                let g = C64::new(0.0, -dt) * phase(-0.5 * (l[m] + l[q]) * dt) * sinc;
                tr += mt[(q, m)] * g * kk[(m, q)];
            }
        }
        d_sum[k] += tr.conj() * c.weight;
        after *= steps[k];
    }
}

/// Builds the objective of a problem, generating its adiabatic targets.
pub fn prepare_objective(problem: &ControlProblem) -> Result<Objective> {
    match problem.objective {
        ObjectiveKind::StateTransfer => {
            let reduced = reduce_state_problem(problem, &problem.target)?;
            Ok(Objective::State {
                drift: reduced.drift,
                control: reduced.control,
                initial: reduced.initial,
                target: reduced.target,
            })
        }
        ObjectiveKind::Gate => {
            let (h1, h2) = realize_pair(problem)?;
            let v = adiabatic_target_unitary(&h1, &h2, problem.target.t_adiabatic, problem.target.n_adiabatic)?;
            Objective::gate(&h1, &h2, &v.unitary)
        }
        ObjectiveKind::EnsembleGate => {
            let sites = symmetry_sites(problem);
            let mut ensemble = block_decompose(problem, &sites)?;
            ensemble.attach_targets(&problem.target, Execution::Parallel)?;
            Objective::ensemble(&ensemble)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub master_seed: u64,
    pub init_range: (f64, f64),
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub infidelity_floor: f64,
    pub memory_depth: usize,
    /// Scheduling only; results do not depend on it, so it is not recorded.
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 100,
            master_seed: 0,
            init_range: (-1.0, 2.0),
            max_iterations: 10_000,
            gradient_tolerance: 1e-12,
            infidelity_floor: 1e-14,
            memory_depth: 10,
            execution: Execution::Parallel,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.init_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(validation(format!("init_range ({lo}, {hi}) is empty")));
        }
        if self.restarts == 0 || self.max_iterations == 0 || self.memory_depth == 0 {
            return Err(validation("restarts, max_iterations and memory_depth must be positive"));
        }
        if !(self.gradient_tolerance > 0.0 && self.infidelity_floor > 0.0) {
            return Err(validation("tolerances must be positive"));
        }
        Ok(())
    }

    fn lbfgs(&self) -> LbfgsConfig {
        LbfgsConfig {
            memory: self.memory_depth,
            max_iterations: self.max_iterations,
            gradient_tolerance: self.gradient_tolerance,
            value_floor: self.infidelity_floor,
            ..LbfgsConfig::default()
        }
    }

    /// Seed of restart `index`.
    pub fn restart_seed(&self, index: usize) -> u64 {
        self.master_seed.wrapping_add(index as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub index: usize,
    pub seed: u64,
    /// Final infidelity; absent when the objective stopped being finite.
    pub infidelity: Option<f64>,
    pub iterations: usize,
    pub exit: ExitReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub best_pulse: Pulse,
    pub best_infidelity: f64,
    pub best_restart: usize,
    pub max_abs_amplitude: f64,
    pub failed_restarts: usize,
    pub per_restart: Vec<RestartRecord>,
    #[serde(skip)]
    pub wall_time: f64,
}

impl OptimizationReport {
    pub fn restarts_used(&self) -> usize {
        self.per_restart.len()
    }
}

/// Amplitudes drawn uniformly from `init_range` with a seeded ChaCha stream.
pub fn random_initial_pulse(seed: u64, duration: f64, segments: usize, init_range: (f64, f64)) -> Result<Pulse> {
    let (lo, hi) = init_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(validation(format!("init_range ({lo}, {hi}) is empty")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Pulse::new(duration, (0..segments).map(|_| rng.random_range(lo..hi)).collect())
}

/// Restarts evaluated between early-exit checks. Fixed so that the set of
/// restarts run never depends on the thread count.
pub const RESTART_CHUNK: usize = 16;

struct RestartResult {
    record: RestartRecord,
    pulse: Pulse,
}

fn run_restart(objective: &Objective, duration: f64, segments: usize, config: &OptimizerConfig, index: usize) -> Result<RestartResult> {
    let seed = config.restart_seed(index);
    let start = random_initial_pulse(seed, duration, segments, config.init_range)?;
    let outcome = lbfgs::minimize(
        |x| {
            let pulse = Pulse {
                duration,
                amplitudes: x.to_vec(),
            };
            objective.infidelity_and_gradient(&pulse)
        },
        start.amplitudes,
        &config.lbfgs(),
    );
    let failed = outcome.exit == ExitReason::NonFinite || !outcome.value.is_finite();
    Ok(RestartResult {
        record: RestartRecord {
            index,
            seed,
            infidelity: (!failed).then_some(outcome.value),
            iterations: outcome.iterations,
            exit: outcome.exit,
        },
        pulse: Pulse {
            duration,
            amplitudes: outcome.x,
        },
    })
}

/// Runs every configured restart and keeps the best.
pub fn optimize(objective: &Objective, duration: f64, segments: usize, config: &OptimizerConfig) -> Result<OptimizationReport> {
    optimize_until(objective, duration, segments, config, None)
}

/// Like [`optimize`], but stops after the first restart (in index order)
/// whose infidelity is at most `stop_at`. Restarts run in fixed chunks, so
/// the reported restarts are the same for any degree of parallelism.
pub fn optimize_until(
    objective: &Objective,
    duration: f64,
    segments: usize,
    config: &OptimizerConfig,
    stop_at: Option<f64>,
) -> Result<OptimizationReport> {
    config.validate()?;
    Pulse::zeros(duration, segments)?;
    let clock = Instant::now();
    let chunk = if stop_at.is_some() { RESTART_CHUNK } else { config.restarts };
    let mut results: Vec<RestartResult> = Vec::new();
    let mut next = 0;
    'chunks: while next < config.restarts {
        let len = chunk.min(config.restarts - next);
        let batch = map_indexed(len, config.execution, |i| {
            run_restart(objective, duration, segments, config, next + i)
        });
        for r in batch {
            let r = r?;
            let hit = matches!((stop_at, r.record.infidelity), (Some(t), Some(v)) if v <= t);
            results.push(r);
            if hit {
                break 'chunks;
            }
        }
        next += len;
    }

    let best = results
        .iter()
        .filter_map(|r| r.record.infidelity.map(|v| (r.record.index, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let Some((best_restart, best_infidelity)) = best else {
        return Err(Error::Configuration(format!(
            "all {} restarts produced non-finite objectives",
            results.len()
        )));
    };
    let best_pulse = results[best_restart].pulse.clone();
    Ok(OptimizationReport {
        max_abs_amplitude: best_pulse.max_abs_amplitude(),
        best_pulse,
        best_infidelity,
        best_restart,
        failed_restarts: results.iter().filter(|r| r.record.infidelity.is_none()).count(),
        per_restart: results.into_iter().map(|r| r.record).collect(),
        wall_time: clock.elapsed().as_secs_f64(),
    })
}
