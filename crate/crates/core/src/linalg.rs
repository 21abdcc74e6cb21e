// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra shared by the propagation and optimization code.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigendecomposition `H = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Decomposes a Hermitian matrix. Matrices with vanishing imaginary part
    /// take the real symmetric path.
    pub fn new(h: &CMatrix) -> Self {
        let n = h.nrows();
        if n == 1 {
            return Self {
                values: vec![h[(0, 0)].re],
                vectors: CMatrix::identity(1, 1),
            };
        }
        let (values, vectors) = if is_real(h) {
            let re = h.map(|z| z.re);
            let eig = SymmetricEigen::new(re);
            (
                eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
                eig.eigenvectors.map(|x| C64::new(x, 0.0)),
            )
        } else {
            let eig = SymmetricEigen::new(h.clone());
            (
                eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
                eig.eigenvectors,
            )
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = order.iter().map(|&i| values[i]).collect();
        let sorted_vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        Self {
            values: sorted_values,
            vectors: sorted_vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i H t)`.
    pub fn exp_neg_i(&self, t: f64) -> CMatrix {
        let phases: Vec<C64> = self.values.iter().map(|&l| phase(-l * t)).collect();
        let mut scaled = self.vectors.clone();
        for (mut col, p) in scaled.column_iter_mut().zip(&phases) {
            col *= *p;
        }
        &scaled * self.vectors.adjoint()
    }

    /// `exp(-i H t) |psi>` without forming the full exponential.
    pub fn apply_exp_neg_i(&self, t: f64, psi: &CVector) -> CVector {
        let mut coeffs = self.vectors.ad_mul(psi);
        for (c, &l) in coeffs.iter_mut().zip(&self.values) {
            *c *= phase(-l * t);
        }
        &self.vectors * coeffs
    }
}

/// `e^{i theta}`.
#[inline]
pub fn phase(theta: f64) -> C64 {
    let (s, c) = theta.sin_cos();
    C64::new(c, s)
}

pub fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// `||H - H†||_F`.
pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    (h - h.adjoint()).norm()
}

/// `||U†U - I||_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    (u.ad_mul(u) - CMatrix::identity(n, n)).norm()
}

/// `Tr(A† B)` without forming the product.
pub fn trace_adjoint_product(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `<a|b>`.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// Orthonormalizes `v` against the columns of `basis` (two passes of
/// classical Gram-Schmidt) and returns the residual norm before scaling.
pub(crate) fn orthogonalize(v: &mut CVector, basis: &[CVector]) -> f64 {
    for _ in 0..2 {
        for q in basis {
            let c = q.dotc(v);
            v.axpy(-c, q, ONE);
        }
    }
    let norm = v.norm();
    if norm > 0.0 {
        *v /= C64::new(norm, 0.0);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn real_and_complex_paths_agree_on_spectrum() {
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(-2.0, 0.0),
                C64::new(0.3, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.3, 0.0),
                C64::new(0.7, 0.0),
            ],
        );
        let real = HermitianEigen::new(&h);
        let complex = SymmetricEigen::new(h.clone());
        let mut reference: Vec<f64> = complex.eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in real.values.iter().zip(&reference) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let rebuilt = &real.vectors
            * CMatrix::from_diagonal(&DVector::from_iterator(
                3,
                real.values.iter().map(|&l| C64::new(l, 0.0)),
            ))
            * real.vectors.adjoint();
        assert!((rebuilt - h).norm() < 1e-12);
    }

    #[test]
    fn exponential_of_pauli_y_is_rotation() {
        let y = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
        let eig = HermitianEigen::new(&y);
        let t = 0.37;
        let u = eig.exp_neg_i(t);
        // exp(-i t Y) = cos t I - i sin t Y
        let expected = CMatrix::identity(2, 2) * C64::new(t.cos(), 0.0) - &y * (I * t.sin());
        assert!((u - expected).norm() < 1e-14);
    }

    #[test]
    fn apply_matches_dense_exponential() {
        let h = CMatrix::from_row_slice(2, 2, &[ONE, C64::new(0.2, -0.4), C64::new(0.2, 0.4), -ONE]);
        let eig = HermitianEigen::new(&h);
        let psi = CVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let a = eig.apply_exp_neg_i(1.3, &psi);
        let b = eig.exp_neg_i(1.3) * &psi;
        assert!((a - b).norm() < 1e-14);
    }
}
