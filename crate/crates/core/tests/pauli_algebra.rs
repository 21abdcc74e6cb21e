// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use defectctl_core::linalg::{CMatrix, C64};
use defectctl_core::pauli::MAX_DENSE_QUBITS;
use defectctl_core::{Axis, Error, OperatorSum, PauliTerm};
use proptest::prelude::*;

fn single(axis: Option<Axis>) -> CMatrix {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    match axis {
        None => CMatrix::identity(2, 2),
        Some(Axis::X) => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        Some(Axis::Y) => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Some(Axis::Z) => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

/// Kronecker product `site 1 ⊗ … ⊗ site n`, built factor by factor.
fn kronecker_oracle(n: usize, coefficient: f64, support: &[(usize, Axis)]) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for site in 1..=n {
        let axis = support.iter().find(|(s, _)| *s == site).map(|&(_, a)| a);
        m = m.kronecker(&single(axis));
    }
    m * C64::new(coefficient, 0.0)
}

fn axis_strategy() -> impl Strategy<Value = Option<Axis>> {
    prop_oneof![Just(None), Just(Some(Axis::X)), Just(Some(Axis::Y)), Just(Some(Axis::Z))]
}

fn support_strategy(n: usize) -> impl Strategy<Value = Vec<(usize, Axis)>> {
    proptest::collection::vec(axis_strategy(), n).prop_map(|axes| {
        axes.into_iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|a| (i + 1, a)))
            .collect()
    })
}

type Support = Vec<(usize, Axis)>;

fn term_pair() -> impl Strategy<Value = (usize, Support, Support)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), support_strategy(n), support_strategy(n)))
}

fn x_only_support(n: usize) -> impl Strategy<Value = Vec<(usize, Axis)>> {
    proptest::collection::vec(prop_oneof![Just(None), Just(Some(Axis::X)), Just(Some(Axis::Z))], n).prop_map(|axes| {
        axes.into_iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|a| (i + 1, a)))
            .collect()
    })
}

proptest! {
    #[test]
    fn realization_matches_kronecker_oracle((n, support, _) in term_pair(), c in -2.0f64..2.0) {
        let term = PauliTerm::new(n, c, &support).unwrap();
        let diff = (term.realize().unwrap() - kronecker_oracle(n, c, &support)).norm();
        prop_assert!(diff < 1e-14);
    }

    #[test]
    fn commutation_matches_matrix_commutator((n, a, b) in term_pair()) {
        let ta = PauliTerm::new(n, 1.0, &a).unwrap();
        let tb = PauliTerm::new(n, 1.0, &b).unwrap();
        let (ma, mb) = (ta.realize().unwrap(), tb.realize().unwrap());
        let commutator = (&ma * &mb - &mb * &ma).norm();
        prop_assert_eq!(ta.commutes(&tb).unwrap(), commutator < 1e-10);
    }

    #[test]
    fn application_matches_realization((n, support, _) in term_pair(), seed in 0u64..1000) {
        let term = PauliTerm::new(n, 0.7, &support).unwrap();
        let dim = 1usize << n;
        let state = defectctl_core::linalg::CVector::from_fn(dim, |i, _| {
            C64::new(((i as u64 * 31 + seed) % 17) as f64, ((i as u64 * 7 + seed) % 5) as f64)
        });
        let diff = (term.apply(&state).unwrap() - term.realize().unwrap() * &state).norm();
        prop_assert!(diff < 1e-12);
    }

    /// On the joint eigenspace of the assigned X operators, a term acts as
    /// its substituted form with identities on the assigned sites.
    #[test]
    fn substitution_matches_sector_projection(
        (n, support) in (2usize..=5).prop_flat_map(|n| (Just(n), x_only_support(n))),
        picks in proptest::collection::vec(any::<bool>(), 5),
        signs in proptest::collection::vec(any::<bool>(), 5),
    ) {
        let term = PauliTerm::new(n, 0.5, &support).unwrap();
        // assign only sites carrying X or nothing, and keep one residual site
        let mut assignments = BTreeMap::new();
        for site in 1..n {
            if picks[site - 1] && term.axis(site) != Some(Axis::Z) {
                assignments.insert(site, if signs[site - 1] { 1i8 } else { -1 });
            }
        }
        let reduced = term.substitute_sites(&assignments).unwrap();

        let residual: Vec<usize> = (1..=n).filter(|s| !assignments.contains_key(s)).collect();
        let embedded_support: Vec<(usize, Axis)> = reduced
            .support()
            .into_iter()
            .map(|(s, a)| (residual[s - 1], a))
            .collect();
        let embedded = kronecker_oracle(n, reduced.coefficient(), &embedded_support);

        let dim = 1usize << n;
        let mut projector = CMatrix::identity(dim, dim);
        for (&site, &value) in &assignments {
            let x = kronecker_oracle(n, f64::from(value), &[(site, Axis::X)]);
            projector = projector * (CMatrix::identity(dim, dim) + x) * C64::new(0.5, 0.0);
        }
        let full = kronecker_oracle(n, 0.5, &support);
        let diff = (full * &projector - embedded * &projector).norm();
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn sums_are_hermitian_and_combine(n in 1usize..=4, coeffs in proptest::collection::vec(-1.0f64..1.0, 1..6), seed in 0usize..64) {
        let terms: Vec<PauliTerm> = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let site = (seed + k) % n + 1;
                let axis = [Axis::X, Axis::Y, Axis::Z][(seed / 3 + k) % 3];
                PauliTerm::new(n, c, &[(site, axis)]).unwrap()
            })
            .collect();
        let sum = OperatorSum::new(n, terms).unwrap();
        let m = sum.realize().unwrap();
        prop_assert!((m.adjoint() - &m).norm() < 1e-14);
        let combined = sum.combined(1e-14).realize().unwrap();
        prop_assert!((combined - &m).norm() < 1e-13);
        prop_assert!(sum.minus(&sum, 1e-14).unwrap().is_empty());
    }
}

#[test]
fn single_site_and_two_site_matrices() {
    let x = PauliTerm::x(1, 1.0, &[1]).unwrap().realize().unwrap();
    assert_eq!(x, single(Some(Axis::X)));
    let zz = PauliTerm::z(2, 1.0, &[1, 2]).unwrap().realize().unwrap();
    let diag: Vec<f64> = (0..4).map(|i| zz[(i, i)].re).collect();
    assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
}

#[test]
fn weight_four_x_string_is_traceless_involution() {
    let m = PauliTerm::x(9, 1.0, &[1, 2, 3, 5]).unwrap().realize().unwrap();
    assert!((&m * &m - CMatrix::identity(512, 512)).norm() < 1e-12);
    assert!(m.trace().norm() < 1e-12);
}

#[test]
fn commutation_examples() {
    let n = 9;
    assert!(!PauliTerm::x(n, 1.0, &[1]).unwrap().commutes(&PauliTerm::z(n, 1.0, &[1]).unwrap()).unwrap());
    assert!(PauliTerm::x(n, 1.0, &[1, 2, 3, 5])
        .unwrap()
        .commutes(&PauliTerm::z(n, 1.0, &[2, 4, 5, 7]).unwrap())
        .unwrap());
    assert!(!PauliTerm::x(n, 1.0, &[1, 3, 6])
        .unwrap()
        .commutes(&PauliTerm::z(n, 1.0, &[4, 6, 7, 9]).unwrap())
        .unwrap());
    let mismatched = PauliTerm::x(3, 1.0, &[1]).unwrap().commutes(&PauliTerm::x(4, 1.0, &[1]).unwrap());
    assert!(matches!(mismatched, Err(Error::Validation(_))));
}

#[test]
fn substitution_examples() {
    let n = 9;
    let t = PauliTerm::x(n, 1.0, &[1, 3, 4, 6]).unwrap();
    let r = t.substitute_sites(&BTreeMap::from([(1, 1), (3, -1)])).unwrap();
    // residual sites 2,4,5,6,7,8,9 renumber to 1..7; X4, X6 become X2, X4
    assert_eq!(r, PauliTerm::x(7, -1.0, &[2, 4]).unwrap());

    let z = PauliTerm::z(n, 1.0, &[4, 6, 7, 9]).unwrap();
    let r = z.substitute_sites(&BTreeMap::from([(1, 1), (3, 1)])).unwrap();
    assert_eq!(r, PauliTerm::z(7, 1.0, &[2, 4, 5, 7]).unwrap());

    let x = PauliTerm::x(n, 1.0, &[4, 9]).unwrap();
    assert_eq!(x.substitute_sites(&BTreeMap::new()).unwrap(), x);

    let bad = z.substitute_sites(&BTreeMap::from([(4, 1)]));
    assert!(matches!(bad, Err(Error::SymmetryViolation(_))));
}

#[test]
fn spectra() {
    let h = OperatorSum::new(1, vec![PauliTerm::z(1, -0.5, &[1]).unwrap()]).unwrap();
    assert_eq!(h.spectrum().unwrap(), vec![-0.5, 0.5]);
}

#[test]
fn dense_guard_and_site_range() {
    let big = PauliTerm::x(MAX_DENSE_QUBITS + 1, 1.0, &[1]).unwrap();
    assert!(matches!(big.realize(), Err(Error::Size { .. })));
    assert!(matches!(PauliTerm::x(3, 1.0, &[4]), Err(Error::Validation(_))));
    assert!(matches!(PauliTerm::x(3, 1.0, &[0]), Err(Error::Validation(_))));
}
