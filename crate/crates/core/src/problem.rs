// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Control problems: the built-in defect operations, problem files, and
//! canonical stabilizer ground states.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::linalg::{CVector, C64, ONE, ZERO};
use crate::pauli::{Axis, OperatorSum, PauliTerm};

/// Coefficients below this magnitude are dropped when forming the control term.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

/// Allowed deviation of an initial state's energy from the drift ground energy.
pub const GROUND_ENERGY_TOLERANCE: f64 = 1e-10;

/// Allowed deviation of a supplied state from unit norm.
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    StateTransfer,
    Gate,
    EnsembleGate,
}

/// How the initial state of a state-transfer problem is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    /// Product reference `|b_1 b_2 … b_n>` (site 1 first) projected onto the
    /// stabilizer ground space of the drift.
    Reference(String),
    /// Explicit amplitudes in the computational basis.
    Amplitudes(Vec<Amplitude>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Reference(String::new())
    }
}

/// A real amplitude or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    fn value(self) -> C64 {
        match self {
            Amplitude::Real(re) => C64::new(re, 0.0),
            Amplitude::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// Parameters of the slow linear ramp that defines the targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub t_adiabatic: f64,
    pub n_adiabatic: usize,
}

impl Default for TargetSpec {
    fn default() -> Self {
        Self {
            t_adiabatic: 1000.0,
            n_adiabatic: 10_000,
        }
    }
}

impl TargetSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_adiabatic.is_finite() && self.t_adiabatic > 0.0) {
            return Err(validation(format!(
                "t_adiabatic must be positive, got {}",
                self.t_adiabatic
            )));
        }
        if self.n_adiabatic == 0 {
            return Err(validation("n_adiabatic must be at least 1"));
        }
        Ok(())
    }
}

/// Drift `H1 = H_i` and control `H2 = H_f - H_i` of `H(t) = H1 + f(t) H2`.
///
/// Energies are in units of the spectral gap and times in its inverse, so
/// `spectral_gap` is carried as metadata and never rescales the dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlProblem {
    pub name: String,
    pub spectral_gap: f64,
    pub objective: ObjectiveKind,
    pub h_initial: OperatorSum,
    pub h_final: OperatorSum,
    pub drift: OperatorSum,
    pub control: OperatorSum,
    pub initial_state: Option<InitialState>,
    pub target: TargetSpec,
}

impl ControlProblem {
    pub fn new(
        name: impl Into<String>,
        h_initial: OperatorSum,
        h_final: OperatorSum,
        objective: ObjectiveKind,
    ) -> Result<Self> {
        let (drift, control) = control_split(&h_initial, &h_final)?;
        Ok(Self {
            name: name.into(),
            spectral_gap: 1.0,
            objective,
            h_initial,
            h_final,
            drift,
            control,
            initial_state: match objective {
                ObjectiveKind::StateTransfer => Some(InitialState::default()),
                _ => None,
            },
            target: TargetSpec::default(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.drift.n_qubits()
    }

    pub fn with_target(mut self, target: TargetSpec) -> Self {
        self.target = target;
        self
    }

    pub fn with_initial_state(mut self, state: InitialState) -> Self {
        self.initial_state = Some(state);
        self
    }

    /// The initial state of a state-transfer problem, unit norm and in the
    /// ground space of the drift.
    pub fn initial_vector(&self) -> Result<CVector> {
        let spec = self.initial_state.as_ref().ok_or_else(|| {
            Error::Configuration(format!("problem '{}' has no initial state", self.name))
        })?;
        let n = self.n_qubits();
        match spec {
            InitialState::Reference(bits) => {
                let reference = if bits.is_empty() {
                    "0".repeat(n)
                } else {
                    bits.clone()
                };
                canonical_ground_state(&self.drift, &reference)
            }
            InitialState::Amplitudes(amps) => {
                if n >= usize::BITS as usize || amps.len() != 1usize << n {
                    return Err(validation(format!(
                        "initial state has {} amplitudes, expected 2^{n}",
                        amps.len()
                    )));
                }
                let psi = CVector::from_iterator(amps.len(), amps.iter().map(|a| a.value()));
                let norm = psi.norm();
                if (norm - 1.0).abs() > NORM_TOLERANCE {
                    return Err(validation(format!("initial state has norm {norm}")));
                }
                let energy = self.drift.expectation(&psi)?;
                let ground = self.drift.spectrum()?[0];
                if (energy - ground).abs() > GROUND_ENERGY_TOLERANCE {
                    return Err(validation(format!(
                        "initial state energy {energy} differs from the drift ground energy {ground}"
                    )));
                }
                Ok(psi)
            }
        }
    }
}

/// `(H1, H2) = (H_i, H_f - H_i)`.
pub fn control_split(h_initial: &OperatorSum, h_final: &OperatorSum) -> Result<(OperatorSum, OperatorSum)> {
    let control = h_final.minus(h_initial, PRUNE_TOLERANCE)?;
    Ok((h_initial.clone(), control))
}

/// Applies `(1 + s P)/2` for every term `c P` of `h`, with `s = -sign(c)`, to a
/// product reference state given as a bitstring (site 1 first).
///
/// The terms must commute pairwise. The result is a simultaneous eigenvector
/// of every term with the energy-lowering eigenvalue.
pub fn canonical_ground_state(h: &OperatorSum, reference: &str) -> Result<CVector> {
    let n = h.n_qubits();
    if reference.len() != n || !reference.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(validation(format!(
            "reference '{reference}' must be a bitstring of length {n}"
        )));
    }
    if n > crate::pauli::MAX_DENSE_QUBITS {
        return Err(Error::Size {
            n_qubits: n,
            max: crate::pauli::MAX_DENSE_QUBITS,
        });
    }
    if !h.all_commute() {
        return Err(validation("ground-state projectors need pairwise commuting terms"));
    }
    let index = usize::from_str_radix(reference, 2).map_err(|e| validation(e.to_string()))?;
    let dim = 1usize << n;
    let mut psi = CVector::zeros(dim);
    psi[index] = ONE;
    for term in h.terms() {
        if term.coefficient() == 0.0 {
            continue;
        }
        let sign = -term.coefficient().signum();
        let unit = term.with_coefficient(sign);
        let mut flipped = vec![ZERO; dim];
        unit.apply_into(psi.as_slice(), &mut flipped);
        for (p, q) in psi.iter_mut().zip(flipped) {
            *p = (*p + q) * 0.5;
        }
    }
    let norm = psi.norm();
    if norm < 1e-12 {
        return Err(Error::DegenerateReference);
    }
    psi /= C64::new(norm, 0.0);
    Ok(psi)
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 4] = ["creation", "deformation1", "detachment", "injection2"];

fn stabilizer_sum(n: usize, x_terms: &[&[usize]], z_terms: &[&[usize]]) -> OperatorSum {
    let mut terms = Vec::new();
    for sites in x_terms {
        terms.push(PauliTerm::x(n, -0.5, sites).expect("preset sites are in range"));
    }
    for sites in z_terms {
        terms.push(PauliTerm::z(n, -0.5, sites).expect("preset sites are in range"));
    }
    OperatorSum::new(n, terms).expect("preset terms share the register")
}

/// One of the built-in defect operations, with unit spectral gap.
pub fn preset(name: &str) -> Result<ControlProblem> {
    let (n, hi, hf, objective) = match name {
        // Two plaquettes removed, vertices shortened, single X on the shared spin.
        "creation" => (
            9,
            stabilizer_sum(9, &[&[1, 2, 3, 5], &[5, 7, 8, 9]], &[&[2, 4, 5, 7], &[3, 5, 6, 8]]),
            stabilizer_sum(9, &[&[1, 2, 3], &[7, 8, 9], &[5]], &[]),
            ObjectiveKind::StateTransfer,
        ),
        "deformation1" => (
            7,
            OperatorSum::new(
                7,
                vec![
                    PauliTerm::z(7, -0.5, &[3, 5, 6, 7])?,
                    PauliTerm::x(7, -0.5, &[2, 3, 5])?,
                    PauliTerm::x(7, -0.5, &[1, 3, 4, 6])?,
                ],
            )?,
            stabilizer_sum(7, &[&[3], &[2, 5], &[1, 4, 6]], &[]),
            ObjectiveKind::StateTransfer,
        ),
        "detachment" => (
            12,
            stabilizer_sum(
                12,
                &[&[1, 3, 4, 6], &[2, 4, 5, 7], &[6, 8, 9, 11], &[7, 9, 10, 12], &[4, 9]],
                &[&[4, 6, 7, 9]],
            ),
            stabilizer_sum(
                12,
                &[&[1, 3, 6], &[2, 5, 7], &[6, 8, 11], &[7, 10, 12], &[4], &[9]],
                &[],
            ),
            ObjectiveKind::EnsembleGate,
        ),
        "injection2" => (
            9,
            stabilizer_sum(9, &[], &[&[1, 2, 3], &[7, 8, 9]]),
            stabilizer_sum(9, &[&[2, 4, 5, 7], &[3, 5, 6, 8]], &[]),
            ObjectiveKind::StateTransfer,
        ),
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                available: PRESETS.to_vec(),
            })
        }
    };
    debug_assert_eq!(hi.n_qubits(), n);
    ControlProblem::new(name, hi, hf, objective)
}

// ---------------------------------------------------------------------------
// Problem files

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub n_qubits: usize,
    #[serde(default = "unit_gap")]
    pub delta: f64,
    pub objective: ObjectiveKind,
    pub h_initial: Vec<TermSpec>,
    pub h_final: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialStateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
}

fn unit_gap() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateSpec {
    pub reference: InitialState,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: Coefficient,
    pub paulis: Vec<FactorSpec>,
}

/// A coefficient as written in a file: a real number, `[re, im]`, or
/// `{"re": .., "im": ..}`. Only real values are accepted.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Pair([f64; 2]),
    Parts { re: f64, im: f64 },
}

impl Coefficient {
    fn parts(self) -> (f64, f64) {
        match self {
            Coefficient::Real(re) => (re, 0.0),
            Coefficient::Pair([re, im]) | Coefficient::Parts { re, im } => (re, im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub site: usize,
    pub axis: Axis,
}

fn build_sum(n: usize, specs: &[TermSpec], field: &str) -> Result<OperatorSum> {
    let mut terms = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let location = format!("{field}[{i}]");
        let (re, im) = spec.coeff.parts();
        if im != 0.0 {
            return Err(Error::NonHermitian {
                location,
                imaginary: im,
            });
        }
        let support: Vec<_> = spec.paulis.iter().map(|f| (f.site, f.axis)).collect();
        let term = PauliTerm::new(n, re, &support)
            .map_err(|e| validation(format!("{location}: {e}")))?;
        terms.push(term);
    }
    OperatorSum::new(n, terms)
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<ControlProblem> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(validation(format!("delta must be positive, got {}", self.delta)));
        }
        let hi = build_sum(self.n_qubits, &self.h_initial, "h_initial")?;
        let hf = build_sum(self.n_qubits, &self.h_final, "h_final")?;
        let mut problem = ControlProblem::new(self.name, hi, hf, self.objective)?;
        problem.spectral_gap = self.delta;
        if let Some(target) = self.target {
            target.validate()?;
            problem.target = target;
        }
        match (self.objective, self.initial_state) {
            (ObjectiveKind::StateTransfer, Some(spec)) => problem.initial_state = Some(spec.reference),
            (ObjectiveKind::StateTransfer, None) => {}
            (_, Some(_)) => {
                return Err(validation("initial_state is only meaningful for state_transfer"))
            }
            (_, None) => {}
        }
        if problem.objective == ObjectiveKind::StateTransfer {
            // surfaces bad references and non-ground amplitudes at load time
            problem.initial_vector()?;
        }
        Ok(problem)
    }

    /// File representation of a problem (used for round trips and templates).
    pub fn from_problem(problem: &ControlProblem) -> Self {
        let specs = |h: &OperatorSum| {
            h.terms()
                .iter()
                .map(|t| TermSpec {
                    coeff: Coefficient::Real(t.coefficient()),
                    paulis: t
                        .support()
                        .into_iter()
                        .map(|(site, axis)| FactorSpec { site, axis })
                        .collect(),
                })
                .collect()
        };
        Self {
            name: problem.name.clone(),
            n_qubits: problem.n_qubits(),
            delta: problem.spectral_gap,
            objective: problem.objective,
            h_initial: specs(&problem.h_initial),
            h_final: specs(&problem.h_final),
            initial_state: problem
                .initial_state
                .clone()
                .map(|reference| InitialStateSpec { reference }),
            target: Some(problem.target),
        }
    }
}

pub fn parse_problem(text: &str) -> std::result::Result<ControlProblem, ParseFailure> {
    let file: ProblemFile = serde_json::from_str(text).map_err(ParseFailure::Json)?;
    file.into_problem().map_err(ParseFailure::Invalid)
}

/// Reads and validates a JSON problem file.
pub fn load_problem(path: impl AsRef<Path>) -> Result<ControlProblem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_problem(&text).map_err(|e| match e {
        ParseFailure::Json(source) => Error::Parse {
            path: path.to_path_buf(),
            source,
        },
        ParseFailure::Invalid(err) => err,
    })
}

#[derive(Debug)]
pub enum ParseFailure {
    Json(serde_json::Error),
    Invalid(Error),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;

    #[test]
    fn creation_term_counts() {
        let p = preset("creation").unwrap();
        assert_eq!(p.n_qubits(), 9);
        assert_eq!(p.drift.len(), 4);
        assert_eq!(p.h_final.len(), 3);
        assert_eq!(p.objective, ObjectiveKind::StateTransfer);
    }

    #[test]
    fn detachment_and_deformation_counts() {
        let d = preset("detachment").unwrap();
        assert_eq!((d.n_qubits(), d.drift.len(), d.h_final.len()), (12, 6, 6));
        assert_eq!(d.objective, ObjectiveKind::EnsembleGate);
        let f = preset("deformation1").unwrap();
        assert_eq!((f.n_qubits(), f.drift.len()), (7, 3));
    }

    #[test]
    fn unknown_preset_lists_names() {
        match preset("braid") {
            Err(Error::UnknownPreset { available, .. }) => assert_eq!(available, PRESETS.to_vec()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn creation_control_term_list() {
        let p = preset("creation").unwrap();
        let term = |c: f64, axis: Axis, sites: &[usize]| {
            let support: Vec<_> = sites.iter().map(|&s| (s, axis)).collect();
            PauliTerm::new(9, c, &support).unwrap()
        };
        let expected = OperatorSum::new(
            9,
            vec![
                term(0.5, Axis::Z, &[2, 4, 5, 7]),
                term(0.5, Axis::Z, &[3, 5, 6, 8]),
                term(0.5, Axis::X, &[1, 2, 3, 5]),
                term(0.5, Axis::X, &[5, 7, 8, 9]),
                term(-0.5, Axis::X, &[1, 2, 3]),
                term(-0.5, Axis::X, &[7, 8, 9]),
                term(-0.5, Axis::X, &[5]),
            ],
        )
        .unwrap();
        assert!(p.control.equivalent(&expected, 1e-15));
        assert_eq!(p.control.len(), 7);
    }

    #[test]
    fn split_edge_cases() {
        let h = preset("creation").unwrap().h_final;
        let (h1, h2) = control_split(&h, &h).unwrap();
        assert_eq!(h1, h);
        assert!(h2.is_empty());
        let zero = OperatorSum::zero(9).unwrap();
        let (_, h2) = control_split(&zero, &h).unwrap();
        assert!(h2.equivalent(&h, 0.0));
        let other = OperatorSum::zero(3).unwrap();
        assert!(control_split(&other, &h).is_err());
    }

    #[test]
    fn single_term_ground_state() {
        let h = OperatorSum::new(1, vec![PauliTerm::z(1, -0.5, &[1]).unwrap()]).unwrap();
        let psi = canonical_ground_state(&h, "0").unwrap();
        assert_eq!(psi.as_slice(), &[ONE, ZERO]);
        assert!(matches!(canonical_ground_state(&h, "1"), Err(Error::DegenerateReference)));
    }

    #[test]
    fn creation_ground_energy() {
        let p = preset("creation").unwrap();
        let psi = p.initial_vector().unwrap();
        assert!((p.drift.expectation(&psi).unwrap() + 2.0).abs() < 1e-12);
        for t in p.drift.terms() {
            let unit = OperatorSum::new(9, vec![t.with_coefficient(1.0)]).unwrap();
            assert!((unit.expectation(&psi).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ground_state_needs_commuting_terms() {
        let h = OperatorSum::new(
            1,
            vec![PauliTerm::z(1, -0.5, &[1]).unwrap(), PauliTerm::x(1, -0.5, &[1]).unwrap()],
        )
        .unwrap();
        assert!(matches!(canonical_ground_state(&h, "0"), Err(Error::Validation(_))));
    }
}
