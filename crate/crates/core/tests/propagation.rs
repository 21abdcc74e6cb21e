// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

use defectctl_core::linalg::{unitarity_defect, CMatrix, CVector, C64};
use defectctl_core::problem::canonical_ground_state;
use defectctl_core::propagation::{
    adiabatic_target_state, apply_to_state, evolve_dense, propagate, propagate_dense, realize_pair,
    reduce_state_problem, segment_unitary,
};
use defectctl_core::{linear_ramp, preset, Error, Pulse, TargetSpec};
use proptest::prelude::*;

fn pulse_strategy(max_segments: usize) -> impl Strategy<Value = Pulse> {
    (0.05f64..4.0, proptest::collection::vec(-2.0f64..3.0, 1..=max_segments))
        .prop_map(|(t, a)| Pulse::new(t, a).unwrap())
}

fn state(dim: usize, seed: u64) -> CVector {
    let v = CVector::from_fn(dim, |i, _| {
        let k = i as u64 * 2654435761 + seed * 97;
        C64::new((k % 1009) as f64 / 1009.0 - 0.5, (k % 313) as f64 / 313.0 - 0.5)
    });
    let n = v.norm();
    v / C64::new(n, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagators_are_unitary(pulse in pulse_strategy(6)) {
        let u = propagate(&preset("deformation1").unwrap(), &pulse).unwrap();
        prop_assert!(u.unitarity_defect() < 1e-10);
    }

    #[test]
    fn composition_over_a_split(pulse in pulse_strategy(8), cut in 1usize..8) {
        prop_assume!(cut < pulse.segments());
        let (h1, h2) = realize_pair(&preset("deformation1").unwrap()).unwrap();
        let whole = propagate_dense(&h1, &h2, &pulse).unwrap().unitary;
        let (head, tail) = pulse.split_at(cut).unwrap();
        let first = propagate_dense(&h1, &h2, &head).unwrap().unitary;
        let second = propagate_dense(&h1, &h2, &tail).unwrap().unitary;
        prop_assert!((whole - second * first).norm() < 1e-12);
    }

    #[test]
    fn reversal_with_negated_hamiltonian_inverts(pulse in pulse_strategy(6)) {
        let (h1, h2) = realize_pair(&preset("deformation1").unwrap()).unwrap();
        let forward = propagate_dense(&h1, &h2, &pulse).unwrap().unitary;
        let neg = C64::new(-1.0, 0.0);
        let back = propagate_dense(&(&h1 * neg), &(&h2 * neg), &pulse.reversed()).unwrap().unitary;
        let dim = forward.nrows();
        prop_assert!((back * forward - CMatrix::identity(dim, dim)).norm() < 1e-10);
    }

    #[test]
    fn matrix_free_evolution_matches_dense(pulse in pulse_strategy(4), seed in 0u64..100) {
        let p = preset("deformation1").unwrap();
        let psi = state(1 << p.n_qubits(), seed);
        let dense = propagate(&p, &pulse).unwrap().unitary * &psi;
        let free = apply_to_state(&p, &pulse, &psi).unwrap();
        prop_assert!((dense - free).norm() < 1e-10);
    }
}

#[test]
fn creation_segment_is_unitary() {
    let (h1, h2) = realize_pair(&preset("creation").unwrap()).unwrap();
    let u = segment_unitary(&h1, &h2, 0.3, 0.1).unwrap();
    assert!(unitarity_defect(&u) < 1e-12);
}

#[test]
fn creation_pulse_matches_segment_product() {
    let p = preset("creation").unwrap();
    let (h1, h2) = realize_pair(&p).unwrap();
    let pulse = Pulse::new(1.3, vec![0.83, -0.41]).unwrap();
    let dt = pulse.dt();
    let oracle = segment_unitary(&h1, &h2, -0.41, dt).unwrap() * segment_unitary(&h1, &h2, 0.83, dt).unwrap();
    assert!((propagate(&p, &pulse).unwrap().unitary - oracle).norm() < 1e-12);
}

#[test]
fn free_evolution_of_an_eigenstate_is_a_phase() {
    let p = preset("creation").unwrap();
    let g = canonical_ground_state(&p.h_initial, "000000000").unwrap();
    let t = 2.7;
    let pulse = Pulse::zeros(t, 3).unwrap();
    let expected = &g * C64::from_polar(1.0, 2.0 * t);
    assert!((propagate(&p, &pulse).unwrap().unitary * &g - &expected).norm() < 1e-12);
    assert!((apply_to_state(&p, &pulse, &g).unwrap() - &expected).norm() < 1e-10);
}

#[test]
fn vanishing_segment_is_identity() {
    let p = preset("deformation1").unwrap();
    let psi = state(128, 3);
    let out = apply_to_state(&p, &Pulse::new(1e-8, vec![0.7]).unwrap(), &psi).unwrap();
    assert!((out - psi).norm() < 1e-6);
}

#[test]
fn state_dimension_is_checked() {
    let p = preset("deformation1").unwrap();
    let bad = CVector::zeros(64);
    assert!(matches!(apply_to_state(&p, &Pulse::zeros(1.0, 1).unwrap(), &bad), Err(Error::Validation(_))));
    let (h1, h2) = realize_pair(&p).unwrap();
    assert!(evolve_dense(&h1, &h2, &Pulse::zeros(1.0, 1).unwrap(), &bad).is_err());
}

#[test]
fn ramp_refinement_converges() {
    let p = preset("creation").unwrap();
    let coarse = adiabatic_target_state(&p, &TargetSpec::default()).unwrap();
    let fine = adiabatic_target_state(
        &p,
        &TargetSpec {
            t_adiabatic: 1000.0,
            n_adiabatic: 20_000,
        },
    )
    .unwrap();
    let deficit = 1.0 - coarse.dotc(&fine).norm_sqr();
    assert!(deficit < 1e-9, "{deficit:e}");
}

#[test]
fn creation_target_reaches_final_ground_energy() {
    let p = preset("creation").unwrap();
    let target = adiabatic_target_state(&p, &TargetSpec::default()).unwrap();
    let energy = p.h_final.expectation(&target).unwrap();
    assert!((energy + 1.5).abs() < 1e-5, "{energy}");
}

#[test]
fn short_ramp_is_not_adiabatic() {
    let p = preset("creation").unwrap();
    let spec = TargetSpec {
        t_adiabatic: 0.1,
        n_adiabatic: 100,
    };
    assert!(matches!(reduce_state_problem(&p, &spec), Err(Error::AdiabaticityFailure { .. })));
}

#[test]
fn reduced_problem_reproduces_full_evolution() {
    let p = preset("creation").unwrap();
    let reduced = reduce_state_problem(&p, &TargetSpec::default()).unwrap();
    assert_eq!(reduced.dim(), 2);
    let pulse = Pulse::new(1.1, vec![1.3, -0.6, 0.2]).unwrap();
    let full = propagate(&p, &pulse).unwrap().unitary * reduced.full_initial();
    let small = evolve_dense(&reduced.drift, &reduced.control, &pulse, &reduced.initial).unwrap();
    assert!((full - &reduced.basis * small).norm() < 1e-12);
}

#[test]
fn linear_ramp_targets_are_consistent() {
    // a ramp equal to the target's own ramp reproduces the target exactly
    let p = preset("deformation1").unwrap();
    let spec = TargetSpec::default();
    let reduced = reduce_state_problem(&p, &spec).unwrap();
    let ramp = linear_ramp(spec.t_adiabatic, spec.n_adiabatic).unwrap();
    let out = evolve_dense(&reduced.drift, &reduced.control, &ramp, &reduced.initial).unwrap();
    assert!((out - &reduced.target).norm() < 1e-12);
}
