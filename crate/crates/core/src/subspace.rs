// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Subspaces left invariant by both the drift and the control.
//!
//! Every propagator of `H1 + f H2` preserves such a subspace, so objectives
//! can be evaluated on the compressed operators `Q† H Q` without loss. The
//! state-transfer objective only sees the closure of the initial state, and a
//! gate objective splits into a trace over an orthogonal family of them.

use crate::linalg::{orthogonalize, CMatrix, CVector, HermitianEigen, C64};

/// Residual norm above which a new Krylov direction is accepted.
const CLOSURE_TOLERANCE: f64 = 1e-9;

/// Mixing weight for the generic element `H1 + w H2`; irrational so that
/// accidental degeneracies between the two operators are unlikely.
const GENERIC_WEIGHT: f64 = 0.618_033_988_749_894_8;

/// Orthonormal basis (as columns) of the smallest subspace containing `seed`
/// and invariant under every operator in `generators`.
pub fn krylov_closure(generators: &[&CMatrix], seed: &CVector) -> CMatrix {
    let mut basis: Vec<CVector> = Vec::new();
    let mut first = seed.clone();
    if orthogonalize(&mut first, &basis) <= CLOSURE_TOLERANCE {
        return CMatrix::zeros(seed.len(), 0);
    }
    basis.push(first);
    let mut next = 0;
    while next < basis.len() {
        for h in generators {
            let mut w = *h * &basis[next];
            if orthogonalize(&mut w, &basis) > CLOSURE_TOLERANCE {
                basis.push(w);
            }
        }
        next += 1;
    }
    CMatrix::from_columns(&basis)
}

/// Splits the whole space into mutually orthogonal subspaces, each invariant
/// under every generator.
pub fn invariant_decomposition(generators: &[&CMatrix]) -> Vec<CMatrix> {
    let Some(first) = generators.first() else {
        return Vec::new();
    };
    let dim = first.nrows();
    let mut generic = (*first).clone();
    for (i, h) in generators.iter().enumerate().skip(1) {
        generic += *h * C64::new(GENERIC_WEIGHT.powi(i as i32), 0.0);
    }
    let eig = HermitianEigen::new(&generic);
    let mut covered: Vec<CVector> = Vec::with_capacity(dim);
    let mut parts = Vec::new();
    for v in eig.vectors.column_iter() {
        if covered.len() == dim {
            break;
        }
        let mut seed = v.into_owned();
        if orthogonalize(&mut seed, &covered) <= 1e-6 {
            continue;
        }
        let q = krylov_closure(generators, &seed);
        // closures of vectors orthogonal to an invariant subspace stay orthogonal to it
        covered.extend(q.column_iter().map(|c| c.into_owned()));
        parts.push(q);
    }
    parts
}

/// `Q† H Q`.
pub fn compress(h: &CMatrix, q: &CMatrix) -> CMatrix {
    q.ad_mul(&(h * q))
}
