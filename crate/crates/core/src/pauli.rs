// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Weighted Pauli strings and Hermitian Pauli sums.
//!
//! A string is stored as a pair of bit masks over sites: bit `s - 1` of the
//! X-mask is set when site `s` carries X or Y, bit `s - 1` of the Z-mask when it
//! carries Z or Y. Sites are 1-based. Commutation is the symplectic parity of
//! the two mask pairs, so nothing dense is built until [`PauliTerm::realize`].
//!
//! Dense realizations use the Kronecker order `site 1 ⊗ site 2 ⊗ … ⊗ site n`,
//! i.e. site 1 is the most significant bit of a basis index.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianEigen, C64, ZERO};

/// Largest qubit count realized as a dense matrix.
pub const MAX_DENSE_QUBITS: usize = 14;

/// Largest qubit count representable by the mask encoding.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    coefficient: f64,
}

fn check_n_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(validation(format!(
            "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn check_dense(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Size {
            n_qubits,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

/// Maps a site-bit mask to the corresponding basis-index mask.
fn index_mask(n_qubits: usize, site_mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = site_mask;
    while m != 0 {
        let bit = m.trailing_zeros() as usize;
        out |= 1u64 << (n_qubits - 1 - bit);
        m &= m - 1;
    }
    out
}

impl PauliTerm {
    pub fn new(n_qubits: usize, coefficient: f64, support: &[(usize, Axis)]) -> Result<Self> {
        check_n_qubits(n_qubits)?;
        if !coefficient.is_finite() {
            return Err(validation("coefficient must be finite"));
        }
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        for &(site, axis) in support {
            if site == 0 || site > n_qubits {
                return Err(validation(format!(
                    "site {site} outside 1..={n_qubits}"
                )));
            }
            let bit = 1u64 << (site - 1);
            if (x_mask | z_mask) & bit != 0 {
                return Err(validation(format!("site {site} appears twice")));
            }
            let (x, z) = axis.bits();
            if x {
                x_mask |= bit;
            }
            if z {
                z_mask |= bit;
            }
        }
        Ok(Self {
            n_qubits,
            x_mask,
            z_mask,
            coefficient,
        })
    }

    /// `coefficient × X_{sites}`.
    pub fn x(n_qubits: usize, coefficient: f64, sites: &[usize]) -> Result<Self> {
        let support: Vec<_> = sites.iter().map(|&s| (s, Axis::X)).collect();
        Self::new(n_qubits, coefficient, &support)
    }

    /// `coefficient × Z_{sites}`.
    pub fn z(n_qubits: usize, coefficient: f64, sites: &[usize]) -> Result<Self> {
        let support: Vec<_> = sites.iter().map(|&s| (s, Axis::Z)).collect();
        Self::new(n_qubits, coefficient, &support)
    }

    pub fn identity(n_qubits: usize, coefficient: f64) -> Result<Self> {
        Self::new(n_qubits, coefficient, &[])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn with_coefficient(mut self, coefficient: f64) -> Self {
        self.coefficient = coefficient;
        self
    }

    pub fn axis(&self, site: usize) -> Option<Axis> {
        if site == 0 || site > self.n_qubits {
            return None;
        }
        let bit = 1u64 << (site - 1);
        match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
            (false, false) => None,
        }
    }

    /// Non-identity factors in ascending site order.
    pub fn support(&self) -> Vec<(usize, Axis)> {
        (1..=self.n_qubits)
            .filter_map(|s| self.axis(s).map(|a| (s, a)))
            .collect()
    }

    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    /// Same Pauli string, ignoring the coefficient.
    pub fn same_string(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits
            && self.x_mask == other.x_mask
            && self.z_mask == other.z_mask
    }

    fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// Whether the realized matrix has only real entries (even number of Y factors).
    pub fn is_real(&self) -> bool {
        self.y_count().is_multiple_of(2)
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        if self.n_qubits != other.n_qubits {
            return Err(validation(format!(
                "cannot compare strings on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        let anti = (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        Ok(anti.is_multiple_of(2))
    }

    /// Replaces X factors on assigned sites by their eigenvalues.
    ///
    /// The result acts on the unassigned sites, renumbered `1..` in ascending
    /// order of their original index.
    pub fn substitute_sites(&self, assignments: &BTreeMap<usize, i8>) -> Result<PauliTerm> {
        let mut coefficient = self.coefficient;
        for (&site, &value) in assignments {
            if site == 0 || site > self.n_qubits {
                return Err(validation(format!(
                    "assigned site {site} outside 1..={}",
                    self.n_qubits
                )));
            }
            if value != 1 && value != -1 {
                return Err(validation(format!(
                    "eigenvalue {value} on site {site} is not ±1"
                )));
            }
            match self.axis(site) {
                None => {}
                Some(Axis::X) => coefficient *= f64::from(value),
                Some(axis) => {
                    return Err(Error::SymmetryViolation(format!(
                        "site {site} carries {axis}, which does not commute with X{site}"
                    )))
                }
            }
        }
        let residual_n = self.n_qubits - assignments.len();
        if residual_n == 0 {
            return Err(validation("substitution leaves no residual sites"));
        }
        let mut support = Vec::new();
        let mut next = 0usize;
        for site in 1..=self.n_qubits {
            if assignments.contains_key(&site) {
                continue;
            }
            next += 1;
            if let Some(axis) = self.axis(site) {
                support.push((next, axis));
            }
        }
        PauliTerm::new(residual_n, coefficient, &support)
    }

    /// `out += coefficient · P · input` on a state of dimension `2^n`.
    pub fn apply_into(&self, input: &[C64], out: &mut [C64]) {
        let n = self.n_qubits;
        let xi = index_mask(n, self.x_mask);
        let zi = index_mask(n, self.z_mask);
        let base = C64::new(self.coefficient, 0.0) * i_power(self.y_count());
        for (b, amp) in input.iter().enumerate() {
            if *amp == ZERO {
                continue;
            }
            let sign = if ((b as u64) & zi).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            out[(b as u64 ^ xi) as usize] += base * amp * sign;
        }
    }

    pub fn apply(&self, state: &CVector) -> Result<CVector> {
        check_state(self.n_qubits, state)?;
        let mut out = CVector::zeros(state.len());
        self.apply_into(state.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn realize(&self) -> Result<CMatrix> {
        check_dense(self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        self.add_to_matrix(&mut m);
        Ok(m)
    }

    fn add_to_matrix(&self, m: &mut CMatrix) {
        let n = self.n_qubits;
        let xi = index_mask(n, self.x_mask);
        let zi = index_mask(n, self.z_mask);
        let base = C64::new(self.coefficient, 0.0) * i_power(self.y_count());
        for b in 0..m.ncols() as u64 {
            let sign = if (b & zi).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            m[((b ^ xi) as usize, b as usize)] += base * sign;
        }
    }
}

fn i_power(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn check_state(n_qubits: usize, state: &CVector) -> Result<()> {
    if n_qubits >= usize::BITS as usize || state.len() != 1usize << n_qubits {
        return Err(validation(format!(
            "state of length {} does not match {n_qubits} qubits",
            state.len()
        )));
    }
    Ok(())
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.coefficient)?;
        let support = self.support();
        if support.is_empty() {
            return write!(f, "·I");
        }
        for (site, axis) in support {
            write!(f, "·{axis}{site}")?;
        }
        Ok(())
    }
}

/// Real-weighted sum of Pauli strings on a common register.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl OperatorSum {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        check_n_qubits(n_qubits)?;
        if let Some((i, t)) = terms.iter().enumerate().find(|(_, t)| t.n_qubits != n_qubits) {
            return Err(validation(format!(
                "term {i} acts on {} qubits, expected {n_qubits}",
                t.n_qubits
            )));
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges repeated strings (first appearance fixes the order) and drops
    /// terms with `|coefficient| <= tolerance`.
    pub fn combined(&self, tolerance: f64) -> Self {
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match merged.iter_mut().find(|m| m.same_string(t)) {
                Some(m) => m.coefficient += t.coefficient,
                None => merged.push(*t),
            }
        }
        merged.retain(|t| t.coefficient.abs() > tolerance);
        Self {
            n_qubits: self.n_qubits,
            terms: merged,
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(validation(format!(
                "operator sums act on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    /// `self + other`, like terms combined.
    pub fn plus(&self, other: &Self, tolerance: f64) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(Self {
            n_qubits: self.n_qubits,
            terms,
        }
        .combined(tolerance))
    }

    /// `self - other`, like terms combined.
    pub fn minus(&self, other: &Self, tolerance: f64) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| t.with_coefficient(-t.coefficient)));
        Ok(Self {
            n_qubits: self.n_qubits,
            terms,
        }
        .combined(tolerance))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| t.with_coefficient(t.coefficient * factor))
                .collect(),
        }
    }

    /// Canonical term list (sorted by string) for exact comparisons.
    pub fn canonical(&self, tolerance: f64) -> Vec<(u64, u64, f64)> {
        let mut out: Vec<_> = self
            .combined(tolerance)
            .terms
            .iter()
            .map(|t| (t.x_mask, t.z_mask, t.coefficient))
            .collect();
        out.sort_by_key(|a| (a.0, a.1));
        out
    }

    /// Term-level equality after combining like strings.
    pub fn equivalent(&self, other: &Self, tolerance: f64) -> bool {
        if self.n_qubits != other.n_qubits {
            return false;
        }
        let a = self.canonical(tolerance);
        let b = other.canonical(tolerance);
        a.len() == b.len()
            && a.iter()
                .zip(&b)
                .all(|(x, y)| x.0 == y.0 && x.1 == y.1 && (x.2 - y.2).abs() <= tolerance)
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(PauliTerm::is_real)
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Whether every pair of terms commutes.
    pub fn all_commute(&self) -> bool {
        self.terms.iter().enumerate().all(|(i, a)| {
            self.terms[i + 1..]
                .iter()
                .all(|b| a.commutes(b).unwrap_or(false))
        })
    }

    pub fn substitute_sites(&self, assignments: &BTreeMap<usize, i8>) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.substitute_sites(assignments))
            .collect::<Result<Vec<_>>>()?;
        let n = self.n_qubits - assignments.len();
        Self::new(n, terms)
    }

    /// Matrix-free `H |psi>`.
    pub fn apply(&self, state: &CVector) -> Result<CVector> {
        check_state(self.n_qubits, state)?;
        let mut out = CVector::zeros(state.len());
        for t in &self.terms {
            t.apply_into(state.as_slice(), out.as_mut_slice());
        }
        Ok(out)
    }

    pub fn realize(&self) -> Result<CMatrix> {
        check_n_qubits(self.n_qubits)?;
        check_dense(self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            t.add_to_matrix(&mut m);
        }
        Ok(m)
    }

    /// Ascending eigenvalues of the realized matrix.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(HermitianEigen::new(&self.realize()?).values)
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, state: &CVector) -> Result<f64> {
        Ok(state.dotc(&self.apply(state)?).re)
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}
