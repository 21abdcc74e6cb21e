// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Limited-memory BFGS with a backtracking Armijo line search.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LbfgsConfig {
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop when the largest gradient component falls below this.
    pub gradient_tolerance: f64,
    /// Stop when the objective falls below this.
    pub value_floor: f64,
    pub armijo: f64,
    pub contraction: f64,
    pub max_backtracks: usize,
    /// Decrease per step below which a step counts as no progress.
    pub stall_tolerance: f64,
    /// Consecutive no-progress steps after which the run stops.
    pub stall_steps: usize,
    /// Keep a per-step record of the line search.
    pub record_trace: bool,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iterations: 10_000,
            gradient_tolerance: 1e-12,
            value_floor: 1e-14,
            armijo: 1e-4,
            contraction: 0.5,
            max_backtracks: 60,
            stall_tolerance: 1e-15,
            stall_steps: 10,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitReason {
    /// The gradient vanished, or the objective stopped decreasing at
    /// working precision.
    GradientConverged,
    InfidelityFloor,
    MaxIterations,
    /// The objective or gradient became NaN or infinite.
    NonFinite,
}

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub value_before: f64,
    pub value_after: f64,
    pub step_length: f64,
    /// Directional derivative `g·d` at the start of the step.
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub exit: ExitReason,
    pub trace: Vec<Step>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn finite(value: f64, grad: &[f64]) -> bool {
    value.is_finite() && grad.iter().all(|g| g.is_finite())
}

/// Minimizes `objective`, which returns the value and gradient at a point.
pub fn minimize<F>(mut objective: F, x0: Vec<f64>, config: &LbfgsConfig) -> Outcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0;
    let (mut value, mut grad) = objective(&x);
    let mut evaluations = 1;
    let mut trace = Vec::new();
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(config.memory);
    let mut stalled = 0;

    let finish = |x, value, iterations, evaluations, exit, trace| Outcome {
        x,
        value,
        iterations,
        evaluations,
        exit,
        trace,
    };

    if !finite(value, &grad) {
        return finish(x, value, 0, evaluations, ExitReason::NonFinite, trace);
    }

    for iteration in 0..config.max_iterations {
        if value <= config.value_floor {
            return finish(x, value, iteration, evaluations, ExitReason::InfidelityFloor, trace);
        }
        if max_abs(&grad) <= config.gradient_tolerance {
            return finish(x, value, iteration, evaluations, ExitReason::GradientConverged, trace);
        }

        let mut direction = two_loop(&grad, &history);
        let mut slope = dot(&grad, &direction);
        // also catches a NaN slope
        if slope.is_nan() || slope >= 0.0 {
            history.clear();
            direction = grad.iter().map(|g| -g).collect();
            slope = dot(&grad, &direction);
        }
        // without curvature information, start with a unit-length step
        let mut alpha = if history.is_empty() {
            1.0 / dot(&direction, &direction).sqrt().max(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        let mut saw_non_finite = false;
        for _ in 0..=config.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&direction).map(|(xi, di)| xi + alpha * di).collect();
            let (v, g) = objective(&trial);
            evaluations += 1;
            if !finite(v, &g) {
                saw_non_finite = true;
            } else if v <= value + config.armijo * alpha * slope {
                accepted = Some((trial, v, g));
                break;
            }
            alpha *= config.contraction;
        }

        let Some((trial, v, g)) = accepted else {
            let exit = if saw_non_finite {
                ExitReason::NonFinite
            } else {
                ExitReason::GradientConverged
            };
            return finish(x, value, iteration, evaluations, exit, trace);
        };

        if config.record_trace {
            trace.push(Step {
                value_before: value,
                value_after: v,
                step_length: alpha,
                slope,
            });
        }
        let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * dot(&y, &y).max(f64::MIN_POSITIVE) && sy > 0.0 {
            if history.len() == config.memory.max(1) {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        stalled = if value - v < config.stall_tolerance { stalled + 1 } else { 0 };
        x = trial;
        value = v;
        grad = g;
        debug_assert_eq!(x.len(), n);
        if stalled >= config.stall_steps.max(1) && value > config.value_floor {
            return finish(x, value, iteration + 1, evaluations, ExitReason::GradientConverged, trace);
        }
    }
    let exit = if value <= config.value_floor {
        ExitReason::InfidelityFloor
    } else {
        ExitReason::MaxIterations
    };
    finish(x, value, config.max_iterations, evaluations, exit, trace)
}

/// `-H g` with the inverse-Hessian estimate built from the stored pairs.
fn two_loop(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in &mut q {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter().map(|v| -v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let (a, b) = (x[0], x[1]);
        let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        (v, g)
    }

    #[test]
    fn solves_rosenbrock() {
        let cfg = LbfgsConfig {
            gradient_tolerance: 1e-10,
            value_floor: 0.0,
            record_trace: true,
            ..LbfgsConfig::default()
        };
        let out = minimize(rosenbrock, vec![-1.2, 1.0], &cfg);
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6, "{:?}", out.x);
        for step in &out.trace {
            assert!(step.value_after <= step.value_before + cfg.armijo * step.step_length * step.slope);
        }
    }

    #[test]
    fn quadratic_converges_quickly() {
        let f = |x: &[f64]| {
            let v = x.iter().enumerate().map(|(i, xi)| (i + 1) as f64 * xi * xi).sum();
            let g = x.iter().enumerate().map(|(i, xi)| 2.0 * (i + 1) as f64 * xi).collect();
            (v, g)
        };
        let out = minimize(f, vec![1.0; 5], &LbfgsConfig::default());
        assert!(out.value < 1e-14);
        assert!(out.iterations < 50);
    }

    #[test]
    fn non_finite_start_is_reported() {
        let out = minimize(|_| (f64::NAN, vec![0.0]), vec![0.0], &LbfgsConfig::default());
        assert_eq!(out.exit, ExitReason::NonFinite);
    }

    #[test]
    fn iteration_cap() {
        let cfg = LbfgsConfig {
            max_iterations: 3,
            value_floor: 0.0,
            gradient_tolerance: 0.0,
            ..LbfgsConfig::default()
        };
        let out = minimize(rosenbrock, vec![-1.2, 1.0], &cfg);
        assert_eq!(out.exit, ExitReason::MaxIterations);
        assert_eq!(out.iterations, 3);
    }
}
