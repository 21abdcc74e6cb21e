// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Sector decomposition under conserved single-site X operators.
//!
//! Fixing the eigenvalue of every conserved `X_s` turns each term into a
//! smaller operator on the remaining sites. Sectors are labelled by integers
//! whose bits follow the ascending symmetry sites (first site most
//! significant), bit 0 standing for eigenvalue +1. The same convention is
//! used when mapping a full state to sector components: a Hadamard on each
//! symmetry site, after which those sites' bits are the sector label.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianEigen, C64, I};
use crate::parallel::{map_indexed, Execution};
use crate::pauli::{Axis, OperatorSum, PauliTerm};
use crate::problem::{ControlProblem, TargetSpec, PRUNE_TOLERANCE};
use crate::propagation::{adiabatic_target_unitary, propagate_dense, Propagator, Pulse};

/// Eigenvalue (±1) of each symmetry site.
pub type Sector = BTreeMap<usize, i8>;

/// Spectral fingerprints closer than this (entrywise) are considered equal.
pub const FINGERPRINT_TOLERANCE: f64 = 1e-9;

/// Single-site Paulis commuting with every term of both Hamiltonians, in
/// ascending (site, axis) order.
pub fn conserved_single_site_paulis(drift: &OperatorSum, control: &OperatorSum) -> Result<Vec<(usize, Axis)>> {
    if drift.n_qubits() != control.n_qubits() {
        return Err(validation("drift and control act on different registers"));
    }
    let n = drift.n_qubits();
    let mut out = Vec::new();
    for site in 1..=n {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let probe = PauliTerm::new(n, 1.0, &[(site, axis)])?;
            let conserved = drift
                .terms()
                .iter()
                .chain(control.terms())
                .all(|t| probe.commutes(t).unwrap_or(false));
            if conserved {
                out.push((site, axis));
            }
        }
    }
    Ok(out)
}

/// Sites whose X operator is conserved by a problem.
pub fn symmetry_sites(problem: &ControlProblem) -> Vec<usize> {
    conserved_single_site_paulis(&problem.drift, &problem.control)
        .unwrap_or_default()
        .into_iter()
        .filter(|&(_, axis)| axis == Axis::X)
        .map(|(site, _)| site)
        .collect()
}

/// One distinct reduced control problem and the sectors that produce it.
#[derive(Debug, Clone)]
pub struct SectorBlock {
    /// The first sector (by label) producing this block.
    pub sector: Sector,
    /// Labels of every sector producing this block.
    pub sector_labels: Vec<usize>,
    pub residual_sites: Vec<usize>,
    pub drift: OperatorSum,
    pub control: OperatorSum,
    pub multiplicity: u64,
    pub target: Option<CMatrix>,
}

impl SectorBlock {
    pub fn dim(&self) -> usize {
        1 << self.residual_sites.len()
    }
}

#[derive(Debug, Clone)]
pub struct BlockEnsemble {
    pub n_qubits: usize,
    pub symmetry_sites: Vec<usize>,
    pub residual_sites: Vec<usize>,
    pub blocks: Vec<SectorBlock>,
    /// Block index of every sector label.
    pub block_of_sector: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    pub representative: usize,
    pub members: Vec<usize>,
}

/// The sector with label `label` over `sites`.
pub fn sector_from_label(sites: &[usize], label: usize) -> Sector {
    let m = sites.len();
    sites
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, if (label >> (m - 1 - i)) & 1 == 0 { 1 } else { -1 }))
        .collect()
}

/// Decomposes a problem over the given conserved X sites and merges sectors
/// whose reduced drift and control coincide term by term.
pub fn block_decompose(problem: &ControlProblem, sites: &[usize]) -> Result<BlockEnsemble> {
    let n = problem.n_qubits();
    let mut sites = sites.to_vec();
    sites.sort_unstable();
    sites.dedup();
    let conserved = symmetry_sites(problem);
    if let Some(bad) = sites.iter().find(|s| !conserved.contains(s)) {
        return Err(Error::SymmetryViolation(format!("X{bad} is not conserved")));
    }
    if sites.len() >= n {
        return Err(validation("at least one residual site is required"));
    }
    if sites.len() > 20 {
        return Err(validation("too many symmetry sites to enumerate sectors"));
    }
    let residual_sites: Vec<usize> = (1..=n).filter(|s| !sites.contains(s)).collect();

    let mut blocks: Vec<SectorBlock> = Vec::new();
    let mut keys: Vec<(TermKey, TermKey)> = Vec::new();
    let mut block_of_sector = Vec::with_capacity(1 << sites.len());
    for label in 0..1usize << sites.len() {
        let sector = sector_from_label(&sites, label);
        let drift = problem.drift.substitute_sites(&sector)?.combined(PRUNE_TOLERANCE);
        let control = problem.control.substitute_sites(&sector)?.combined(PRUNE_TOLERANCE);
        let key = (drift.canonical(0.0), control.canonical(0.0));
        let found = keys.iter().position(|k| same_terms(k, &key));
        let index = match found {
            Some(j) => {
                blocks[j].multiplicity += 1;
                blocks[j].sector_labels.push(label);
                j
            }
            None => {
                keys.push(key);
                blocks.push(SectorBlock {
                    sector,
                    sector_labels: vec![label],
                    residual_sites: residual_sites.clone(),
                    drift,
                    control,
                    multiplicity: 1,
                    target: None,
                });
                blocks.len() - 1
            }
        };
        block_of_sector.push(index);
    }
    Ok(BlockEnsemble {
        n_qubits: n,
        symmetry_sites: sites,
        residual_sites,
        blocks,
        block_of_sector,
    })
}

type TermKey = Vec<(u64, u64, f64)>;

fn same_terms(a: &(TermKey, TermKey), b: &(TermKey, TermKey)) -> bool {
    let eq = |x: &TermKey, y: &TermKey| {
        x.len() == y.len()
            && x.iter()
                .zip(y)
                .all(|(p, q)| p.0 == q.0 && p.1 == q.1 && (p.2 - q.2).abs() <= PRUNE_TOLERANCE)
    };
    eq(&a.0, &b.0) && eq(&a.1, &b.1)
}

impl BlockEnsemble {
    pub fn sector_count(&self) -> usize {
        self.block_of_sector.len()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.blocks.iter().map(|b| b.multiplicity).sum()
    }

    pub fn block_dim(&self) -> usize {
        1 << self.residual_sites.len()
    }

    /// Generates every block's target with the same ramp, so relative phases
    /// between blocks are consistent.
    pub fn attach_targets(&mut self, spec: &TargetSpec, execution: Execution) -> Result<()> {
        spec.validate()?;
        let targets = map_indexed(self.blocks.len(), execution, |j| {
            let b = &self.blocks[j];
            let (h1, h2) = (b.drift.realize()?, b.control.realize()?);
            adiabatic_target_unitary(&h1, &h2, spec.t_adiabatic, spec.n_adiabatic)
        });
        for (block, target) in self.blocks.iter_mut().zip(targets) {
            block.target = Some(target?.unitary);
        }
        Ok(())
    }

    /// Per-block propagators of a pulse.
    pub fn block_propagators(&self, pulse: &Pulse, execution: Execution) -> Result<Vec<Propagator>> {
        map_indexed(self.blocks.len(), execution, |j| {
            let b = &self.blocks[j];
            propagate_dense(&b.drift.realize()?, &b.control.realize()?, pulse)
        })
        .into_iter()
        .collect()
    }

    /// Applies the direct sum of `unitaries` (one per block) to a full state.
    pub fn apply_direct_sum(&self, unitaries: &[CMatrix], state: &CVector) -> Result<CVector> {
        let n = self.n_qubits;
        if state.len() != 1usize << n {
            return Err(validation(format!(
                "state of length {} does not match {n} qubits",
                state.len()
            )));
        }
        if unitaries.len() != self.blocks.len() {
            return Err(validation("one unitary per block is required"));
        }
        let mut psi = state.clone();
        for &s in &self.symmetry_sites {
            hadamard(&mut psi, n, s);
        }
        let residual_offsets = self.index_offsets(&self.residual_sites);
        let sector_offsets = self.index_offsets(&self.symmetry_sites);
        let mut out = CVector::zeros(psi.len());
        let mut chunk = CVector::zeros(residual_offsets.len());
        for (label, &block) in self.block_of_sector.iter().enumerate() {
            let base = sector_offsets[label];
            for (r, &off) in residual_offsets.iter().enumerate() {
                chunk[r] = psi[base | off];
            }
            let evolved = &unitaries[block] * &chunk;
            for (r, &off) in residual_offsets.iter().enumerate() {
                out[base | off] = evolved[r];
            }
        }
        for &s in &self.symmetry_sites {
            hadamard(&mut out, n, s);
        }
        Ok(out)
    }

    /// Full-register index of every combination of bits on `sites`, the
    /// first site being the most significant bit of the combination.
    fn index_offsets(&self, sites: &[usize]) -> Vec<usize> {
        let n = self.n_qubits;
        let m = sites.len();
        (0..1usize << m)
            .map(|c| {
                sites
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (c >> (m - 1 - i)) & 1 == 1)
                    .map(|(_, &s)| 1usize << (n - s))
                    .sum()
            })
            .collect()
    }

    /// The direct sum of `unitaries` as a full-register matrix in the
    /// computational basis.
    pub fn assemble_direct_sum(&self, unitaries: &[CMatrix]) -> Result<CMatrix> {
        let dim = 1usize << self.n_qubits;
        let mut full = CMatrix::zeros(dim, dim);
        let mut e = CVector::zeros(dim);
        for col in 0..dim {
            e[col] = C64::new(1.0, 0.0);
            let image = self.apply_direct_sum(unitaries, &e)?;
            full.set_column(col, &image);
            e[col] = C64::new(0.0, 0.0);
        }
        Ok(full)
    }

    /// Evolves a full state block by block.
    pub fn evolve_state(&self, pulse: &Pulse, state: &CVector, execution: Execution) -> Result<CVector> {
        let unitaries: Vec<CMatrix> = self
            .block_propagators(pulse, execution)?
            .into_iter()
            .map(|p| p.unitary)
            .collect();
        self.apply_direct_sum(&unitaries, state)
    }

    /// The block targets, in block order.
    pub fn targets(&self) -> Result<Vec<&CMatrix>> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(j, b)| {
                b.target
                    .as_ref()
                    .ok_or_else(|| Error::Configuration(format!("block {j} has no target unitary")))
            })
            .collect()
    }
}

/// In-place Hadamard on one site.
fn hadamard(psi: &mut CVector, n: usize, site: usize) {
    let bit = 1usize << (n - site);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for b in 0..psi.len() {
        if b & bit == 0 {
            let (a, c) = (psi[b], psi[b | bit]);
            psi[b] = (a + c) * h;
            psi[b | bit] = (a - c) * h;
        }
    }
}

/// Sorted spectra of the drift, control, their sum, and the Hermitian and
/// anti-Hermitian parts of the target.
pub fn fingerprint(block: &SectorBlock) -> Result<Vec<f64>> {
    let target = block
        .target
        .as_ref()
        .ok_or_else(|| Error::Configuration("fingerprints need block targets".into()))?;
    let h1 = block.drift.realize()?;
    let h2 = block.control.realize()?;
    let cos_part = (target + target.adjoint()) * C64::new(0.5, 0.0);
    let sin_part = (target - target.adjoint()) * (-I * 0.5);
    let mut out = Vec::new();
    for m in [&h1, &h2, &(&h1 + &h2), &cos_part, &sin_part] {
        out.extend(HermitianEigen::new(m).values);
    }
    Ok(out)
}

/// Groups blocks with matching fingerprints. Representatives are the first
/// member of each class in block order.
pub fn equivalence_classes(ensemble: &BlockEnsemble) -> Result<Vec<EquivalenceClass>> {
    let prints = ensemble
        .blocks
        .iter()
        .map(fingerprint)
        .collect::<Result<Vec<_>>>()?;
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    for (j, p) in prints.iter().enumerate() {
        let same = |q: &Vec<f64>| {
            p.len() == q.len() && p.iter().zip(q).all(|(a, b)| (a - b).abs() <= FINGERPRINT_TOLERANCE)
        };
        match classes.iter_mut().find(|c| same(&prints[c.representative])) {
            Some(c) => c.members.push(j),
            None => classes.push(EquivalenceClass {
                representative: j,
                members: vec![j],
            }),
        }
    }
    Ok(classes)
}

/// Formats a sector as a string of signs, e.g. `+-++`.
pub fn sector_signs(sector: &Sector) -> String {
    sector.values().map(|&v| if v > 0 { '+' } else { '-' }).collect()
}
