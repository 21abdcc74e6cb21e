// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment drivers and result files.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::grape::{optimize_until, prepare_objective, Objective, OptimizationReport, OptimizerConfig};
use crate::parallel::Execution;
use crate::problem::{preset, ControlProblem, ObjectiveKind, TargetSpec, PRESETS};
use crate::propagation::{linear_ramp, Pulse};
use crate::symmetry::{block_decompose, equivalence_classes, sector_signs, symmetry_sites};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default drop-time threshold.
pub const DEFAULT_EPSILON: f64 = 1e-7;

/// Default segment count of baseline ramps.
pub const DEFAULT_RAMP_SEGMENTS: usize = 1000;

/// `start, start + step, …` up to `stop` (inclusive, with rounding slack).
pub fn time_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop >= start && step > 0.0) || ![start, stop, step].iter().all(|v| v.is_finite()) {
        return Err(validation(format!("invalid grid {start}:{step}:{stop}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // rounding each point keeps grid values identical to their decimal spelling
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselinePoint {
    pub time: f64,
    pub infidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineCurve {
    pub version: String,
    pub problem: String,
    pub ramp_segments: usize,
    pub target: TargetSpec,
    pub points: Vec<BaselinePoint>,
}

/// Linear-ramp infidelity at every grid time.
pub fn baseline_curve(objective: &Objective, grid: &[f64], ramp_segments: usize) -> Result<Vec<BaselinePoint>> {
    grid.iter()
        .map(|&time| {
            let pulse = linear_ramp(time, ramp_segments)?;
            Ok(BaselinePoint {
                time,
                infidelity: objective.infidelity(&pulse),
            })
        })
        .collect()
}

pub fn baseline_for(problem: &ControlProblem, grid: &[f64], ramp_segments: usize) -> Result<BaselineCurve> {
    let objective = prepare_objective(problem)?;
    Ok(BaselineCurve {
        version: VERSION.into(),
        problem: problem.name.clone(),
        ramp_segments,
        target: problem.target,
        points: baseline_curve(&objective, grid, ramp_segments)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub time: f64,
    pub infidelity_linear: f64,
    pub infidelity_opt: f64,
    pub restarts: usize,
    pub best_pulse: Pulse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub version: String,
    pub problem: String,
    pub segments: usize,
    pub ramp_segments: usize,
    pub epsilon: f64,
    pub config: OptimizerConfig,
    pub target: TargetSpec,
    pub grid: Vec<f64>,
    pub records: Vec<SweepRecord>,
    pub drop_time: Option<f64>,
}

/// Optimizes at every grid time, stopping each point's restarts once one
/// reaches `epsilon / 10`. The drop time is the first grid time whose best
/// infidelity is at most `epsilon`.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    problem_name: &str,
    objective: &Objective,
    target: TargetSpec,
    grid: &[f64],
    segments: usize,
    config: &OptimizerConfig,
    epsilon: f64,
    ramp_segments: usize,
) -> Result<SweepResult> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(validation("sweep grid must be strictly ascending"));
    }
    let mut records = Vec::with_capacity(grid.len());
    for &time in grid {
        let linear = objective.infidelity(&linear_ramp(time, ramp_segments)?);
        let report = optimize_until(objective, time, segments, config, Some(epsilon / 10.0))?;
        records.push(SweepRecord {
            time,
            infidelity_linear: linear,
            infidelity_opt: report.best_infidelity,
            restarts: report.restarts_used(),
            best_pulse: report.best_pulse,
        });
    }
    let drop_time = records.iter().find(|r| r.infidelity_opt <= epsilon).map(|r| r.time);
    Ok(SweepResult {
        version: VERSION.into(),
        problem: problem_name.into(),
        segments,
        ramp_segments,
        epsilon,
        config: config.clone(),
        target,
        grid: grid.to_vec(),
        records,
        drop_time,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub segments: usize,
    pub best_infidelity: f64,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinSegmentsResult {
    pub version: String,
    pub problem: String,
    pub time: f64,
    pub epsilon: f64,
    pub config: OptimizerConfig,
    pub records: Vec<SegmentRecord>,
    pub min_segments: Option<usize>,
}

/// Scans `N = 1..=max_segments` and returns the first `N` whose best
/// infidelity reaches `epsilon`.
pub fn min_segments(
    problem_name: &str,
    objective: &Objective,
    time: f64,
    max_segments: usize,
    config: &OptimizerConfig,
    epsilon: f64,
) -> Result<MinSegmentsResult> {
    let mut records = Vec::new();
    let mut found = None;
    for n in 1..=max_segments {
        let report = optimize_until(objective, time, n, config, Some(epsilon))?;
        records.push(SegmentRecord {
            segments: n,
            best_infidelity: report.best_infidelity,
            restarts: report.restarts_used(),
        });
        if report.best_infidelity <= epsilon {
            found = Some(n);
            break;
        }
    }
    Ok(MinSegmentsResult {
        version: VERSION.into(),
        problem: problem_name.into(),
        time,
        epsilon,
        config: config.clone(),
        records,
        min_segments: found,
    })
}

/// A full optimization at one `(T, N)`, with its settings for the record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub version: String,
    pub problem: String,
    pub time: f64,
    pub segments: usize,
    pub config: OptimizerConfig,
    pub target: TargetSpec,
    pub infidelity_linear: f64,
    pub report: OptimizationReport,
}

pub fn solve(problem: &ControlProblem, time: f64, segments: usize, config: &OptimizerConfig, stop_at: Option<f64>) -> Result<SolveResult> {
    let objective = prepare_objective(problem)?;
    let report = optimize_until(&objective, time, segments, config, stop_at)?;
    Ok(SolveResult {
        version: VERSION.into(),
        problem: problem.name.clone(),
        time,
        segments,
        config: config.clone(),
        target: problem.target,
        infidelity_linear: objective.infidelity(&linear_ramp(time, DEFAULT_RAMP_SEGMENTS)?),
        report,
    })
}

/// Settings of one table row.
#[derive(Debug, Clone)]
pub struct TableEntry {
    pub problem: ControlProblem,
    pub grid: Vec<f64>,
    /// Segment count used while sweeping for the drop time.
    pub sweep_segments: usize,
    pub max_segments: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub problem: String,
    pub spins: usize,
    pub drop_time: Option<f64>,
    pub min_segments: Option<usize>,
    pub infidelity_linear: Option<f64>,
    pub infidelity_opt: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub version: String,
    pub epsilon: f64,
    pub ramp_segments: usize,
    pub config: OptimizerConfig,
    pub rows: Vec<TableRow>,
}

/// Drop time, minimal segment count, and both infidelities at the drop time
/// for each problem. A failing problem is reported in its row.
pub fn table_report(entries: &[TableEntry], config: &OptimizerConfig, epsilon: f64, ramp_segments: usize) -> TableReport {
    let rows = entries
        .iter()
        .map(|entry| {
            let mut row = TableRow {
                problem: entry.problem.name.clone(),
                spins: entry.problem.n_qubits(),
                drop_time: None,
                min_segments: None,
                infidelity_linear: None,
                infidelity_opt: None,
                error: None,
            };
            if let Err(e) = fill_row(&mut row, entry, config, epsilon, ramp_segments) {
                row.error = Some(e.to_string());
            }
            row
        })
        .collect();
    TableReport {
        version: VERSION.into(),
        epsilon,
        ramp_segments,
        config: config.clone(),
        rows,
    }
}

fn fill_row(row: &mut TableRow, entry: &TableEntry, config: &OptimizerConfig, epsilon: f64, ramp_segments: usize) -> Result<()> {
    let objective = prepare_objective(&entry.problem)?;
    let s = sweep(
        &entry.problem.name,
        &objective,
        entry.problem.target,
        &entry.grid,
        entry.sweep_segments,
        config,
        epsilon,
        ramp_segments,
    )?;
    let Some(t_drop) = s.drop_time else {
        return Ok(());
    };
    row.drop_time = Some(t_drop);
    row.infidelity_linear = Some(objective.infidelity(&linear_ramp(t_drop, ramp_segments)?));
    let m = min_segments(&entry.problem.name, &objective, t_drop, entry.max_segments, config, epsilon)?;
    row.min_segments = m.min_segments;
    row.infidelity_opt = m.records.last().map(|r| r.best_infidelity);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub sector: String,
    pub multiplicity: u64,
    pub dim: usize,
    pub drift: String,
    pub control: String,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub version: String,
    pub problem: String,
    pub symmetry_sites: Vec<usize>,
    pub residual_sites: Vec<usize>,
    pub sectors: usize,
    pub target: TargetSpec,
    pub blocks: Vec<BlockSummary>,
    pub classes: Vec<Vec<usize>>,
}

/// Symmetry sites, distinct blocks and their equivalence classes.
pub fn block_report(problem: &ControlProblem, execution: Execution) -> Result<BlockReport> {
    let sites = symmetry_sites(problem);
    let mut ensemble = block_decompose(problem, &sites)?;
    ensemble.attach_targets(&problem.target, execution)?;
    let classes = equivalence_classes(&ensemble)?;
    let mut class_of = vec![0; ensemble.blocks.len()];
    for (c, class) in classes.iter().enumerate() {
        for &m in &class.members {
            class_of[m] = c;
        }
    }
    Ok(BlockReport {
        version: VERSION.into(),
        problem: problem.name.clone(),
        symmetry_sites: ensemble.symmetry_sites.clone(),
        residual_sites: ensemble.residual_sites.clone(),
        sectors: ensemble.sector_count(),
        target: problem.target,
        blocks: ensemble
            .blocks
            .iter()
            .zip(&class_of)
            .map(|(b, &class)| BlockSummary {
                sector: sector_signs(&b.sector),
                multiplicity: b.multiplicity,
                dim: b.dim(),
                drift: b.drift.to_string(),
                control: b.control.to_string(),
                class,
            })
            .collect(),
        classes: classes.into_iter().map(|c| c.members).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub spins: usize,
    pub objective: ObjectiveKind,
    pub initial_terms: usize,
    pub final_terms: usize,
    pub control_terms: usize,
    pub symmetry_sites: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub version: String,
    pub entries: Vec<CatalogEntry>,
}

/// One line per preset problem.
pub fn catalog() -> Result<Catalog> {
    let entries = PRESETS
        .iter()
        .map(|&name| {
            let p = preset(name)?;
            Ok(CatalogEntry {
                name: p.name.clone(),
                spins: p.n_qubits(),
                objective: p.objective,
                initial_terms: p.h_initial.len(),
                final_terms: p.h_final.len(),
                control_terms: p.control.len(),
                symmetry_sites: symmetry_sites(&p),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Catalog {
        version: VERSION.into(),
        entries,
    })
}

// ---------------------------------------------------------------------------
// Output files

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::UnknownFormat(other.into())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// A result that can be written as a table. Metadata lines are emitted as
/// `#`-prefixed comments ahead of the header.
pub trait Tabular {
    fn metadata(&self) -> Vec<(String, String)>;
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(v: f64) -> String {
    // Display gives the shortest string that parses back to the same f64
    format!("{v}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn json_of<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("settings serialize")
}

impl Tabular for SweepResult {
    fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("version".into(), self.version.clone()),
            ("problem".into(), self.problem.clone()),
            ("master_seed".into(), self.config.master_seed.to_string()),
            ("segments".into(), self.segments.to_string()),
            ("ramp_segments".into(), self.ramp_segments.to_string()),
            ("epsilon".into(), num(self.epsilon)),
            ("drop_time".into(), opt(self.drop_time.map(num))),
            ("grid".into(), json_of(&self.grid)),
            ("target".into(), json_of(&self.target)),
            ("config".into(), json_of(&self.config)),
        ]
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["T", "infidelity_linear", "infidelity_opt", "restarts", "amplitudes"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.records
            .iter()
            .map(|r| {
                vec![
                    num(r.time),
                    num(r.infidelity_linear),
                    num(r.infidelity_opt),
                    r.restarts.to_string(),
                    r.best_pulse.amplitudes.iter().map(|&a| num(a)).collect::<Vec<_>>().join(" "),
                ]
            })
            .collect()
    }
}

impl Tabular for BaselineCurve {
    fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("version".into(), self.version.clone()),
            ("problem".into(), self.problem.clone()),
            ("ramp_segments".into(), self.ramp_segments.to_string()),
            ("target".into(), json_of(&self.target)),
        ]
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["T", "infidelity_linear"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.points.iter().map(|p| vec![num(p.time), num(p.infidelity)]).collect()
    }
}

impl Tabular for SolveResult {
    fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("version".into(), self.version.clone()),
            ("problem".into(), self.problem.clone()),
            ("master_seed".into(), self.config.master_seed.to_string()),
            ("T".into(), num(self.time)),
            ("segments".into(), self.segments.to_string()),
            ("infidelity_linear".into(), num(self.infidelity_linear)),
            ("best_infidelity".into(), num(self.report.best_infidelity)),
            ("best_restart".into(), self.report.best_restart.to_string()),
            (
                "best_amplitudes".into(),
                json_of(&self.report.best_pulse.amplitudes),
            ),
            ("target".into(), json_of(&self.target)),
            ("config".into(), json_of(&self.config)),
        ]
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["restart", "seed", "infidelity", "iterations", "exit"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.report
            .per_restart
            .iter()
            .map(|r| {
                vec![
                    r.index.to_string(),
                    r.seed.to_string(),
                    opt(r.infidelity.map(num)),
                    r.iterations.to_string(),
                    json_of(&r.exit).trim_matches('"').to_string(),
                ]
            })
            .collect()
    }
}

impl Tabular for MinSegmentsResult {
    fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("version".into(), self.version.clone()),
            ("problem".into(), self.problem.clone()),
            ("master_seed".into(), self.config.master_seed.to_string()),
            ("T".into(), num(self.time)),
            ("epsilon".into(), num(self.epsilon)),
            ("min_segments".into(), opt(self.min_segments)),
            ("config".into(), json_of(&self.config)),
        ]
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["segments", "best_infidelity", "restarts"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.records
            .iter()
            .map(|r| vec![r.segments.to_string(), num(r.best_infidelity), r.restarts.to_string()])
            .collect()
    }
}

impl Tabular for TableReport {
    fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("version".into(), self.version.clone()),
            ("master_seed".into(), self.config.master_seed.to_string()),
            ("epsilon".into(), num(self.epsilon)),
            ("ramp_segments".into(), self.ramp_segments.to_string()),
            ("config".into(), json_of(&self.config)),
        ]
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["problem", "spins", "T_d", "N_r", "infidelity_linear", "infidelity_opt", "error"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.problem.clone(),
                    r.spins.to_string(),
                    opt(r.drop_time.map(num)),
                    opt(r.min_segments),
                    opt(r.infidelity_linear.map(num)),
                    opt(r.infidelity_opt.map(num)),
                    r.error.clone().unwrap_or_default(),
                ]
            })
            .collect()
    }
}

impl Tabular for BlockReport {
    fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("version".into(), self.version.clone()),
            ("problem".into(), self.problem.clone()),
            ("symmetry_sites".into(), json_of(&self.symmetry_sites)),
            ("residual_sites".into(), json_of(&self.residual_sites)),
            ("sectors".into(), self.sectors.to_string()),
            ("classes".into(), self.classes.len().to_string()),
            ("target".into(), json_of(&self.target)),
        ]
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["block", "sector", "multiplicity", "dim", "class", "drift", "control"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(j, b)| {
                vec![
                    j.to_string(),
                    b.sector.clone(),
                    b.multiplicity.to_string(),
                    b.dim.to_string(),
                    b.class.to_string(),
                    b.drift.clone(),
                    b.control.clone(),
                ]
            })
            .collect()
    }
}

impl Tabular for Catalog {
    fn metadata(&self) -> Vec<(String, String)> {
        vec![("version".into(), self.version.clone())]
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["problem", "spins", "objective", "initial_terms", "final_terms", "control_terms", "symmetry_sites"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|e| {
                vec![
                    e.name.clone(),
                    e.spins.to_string(),
                    json_of(&e.objective).trim_matches('"').to_string(),
                    e.initial_terms.to_string(),
                    e.final_terms.to_string(),
                    e.control_terms.to_string(),
                    json_of(&e.symmetry_sites),
                ]
            })
            .collect()
    }
}

/// Renders a result in the requested format.
pub fn render<T: Tabular + Serialize>(result: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(result)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in result.metadata() {
                out.push_str(&format!("# {k}={v}\n"));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(result.header())?;
            for row in result.rows() {
                w.write_record(&row)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
            Ok(out)
        }
    }
}

/// Writes a result to `path`.
pub fn emit<T: Tabular + Serialize>(result: &T, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let text = render(result, format)?;
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(text.as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Reads back a JSON result.
pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// A CSV result split into metadata, header and rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<CsvTable> {
    let text = std::fs::read_to_string(path)?;
    let metadata = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l[1..].trim_start().split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
    Ok(CsvTable {
        metadata,
        header,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spelling() {
        let g = time_grid(1.0, 1.3, 0.05).unwrap();
        assert_eq!(g, vec![1.0, 1.05, 1.1, 1.15, 1.2, 1.25, 1.3]);
        let g = time_grid(2.8, 3.2, 0.025).unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g[11], 3.075);
        assert!(time_grid(1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert!(matches!("xml".parse::<Format>(), Err(Error::UnknownFormat(_))));
    }
}
