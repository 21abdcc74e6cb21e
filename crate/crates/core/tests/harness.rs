// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

use defectctl_core::harness::{
    baseline_for, block_report, catalog, emit, load_json, min_segments, read_csv, solve, sweep, table_report, time_grid,
    BaselineCurve, Format, SweepResult, TableEntry, TableReport,
};
use defectctl_core::{prepare_objective, preset, ControlProblem, ObjectiveKind, OptimizerConfig};

fn config(restarts: usize) -> OptimizerConfig {
    OptimizerConfig {
        restarts,
        ..OptimizerConfig::default()
    }
}

fn static_problem() -> ControlProblem {
    let hi = preset("creation").unwrap().h_initial;
    ControlProblem::new("static", hi.clone(), hi, ObjectiveKind::StateTransfer).unwrap()
}

fn creation_sweep(grid: &[f64], restarts: usize) -> SweepResult {
    let p = preset("creation").unwrap();
    let objective = prepare_objective(&p).unwrap();
    sweep("creation", &objective, p.target, grid, 2, &config(restarts), 1e-7, 1000).unwrap()
}

#[test]
fn sweep_json_round_trip() {
    let result = creation_sweep(&time_grid(1.0, 1.3, 0.1).unwrap(), 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    emit(&result, &path, Format::Json).unwrap();
    let back: SweepResult = load_json(&path).unwrap();
    assert_eq!(back, result);
}

#[test]
fn sweep_csv_round_trip() {
    let result = creation_sweep(&time_grid(1.0, 1.3, 0.1).unwrap(), 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    emit(&result, &path, Format::Csv).unwrap();
    let table = read_csv(&path).unwrap();
    assert_eq!(&table.header[..4], ["T", "infidelity_linear", "infidelity_opt", "restarts"]);
    assert_eq!(table.rows.len(), result.records.len());
    let parse = |col: &str| -> Vec<f64> { table.column(col).unwrap().iter().map(|s| s.parse().unwrap()).collect() };
    for (i, r) in result.records.iter().enumerate() {
        assert!((parse("T")[i] - r.time).abs() <= 1e-15);
        assert!((parse("infidelity_linear")[i] - r.infidelity_linear).abs() <= 1e-15);
        assert!((parse("infidelity_opt")[i] - r.infidelity_opt).abs() <= 1e-15);
        assert_eq!(table.column("restarts").unwrap()[i], r.restarts.to_string());
    }
    assert_eq!(table.meta("problem"), Some("creation"));
    assert_eq!(table.meta("master_seed"), Some("0"));
    assert_eq!(table.meta("drop_time"), Some(result.drop_time.map(|t| t.to_string()).unwrap_or_default().as_str()));
}

#[test]
fn short_grid_has_no_drop_time() {
    let result = creation_sweep(&time_grid(0.1, 0.5, 0.1).unwrap(), 10);
    assert_eq!(result.drop_time, None);
    assert!(result.records.iter().all(|r| r.infidelity_opt > 1e-7));
    assert!(result.records.iter().all(|r| r.restarts == 10));
}

#[test]
fn descending_grid_is_rejected() {
    let p = preset("creation").unwrap();
    let objective = prepare_objective(&p).unwrap();
    assert!(sweep("creation", &objective, p.target, &[1.0, 0.9], 2, &config(1), 1e-7, 1000).is_err());
}

#[test]
fn segment_scan() {
    let objective = prepare_objective(&preset("deformation1").unwrap()).unwrap();
    let r = min_segments("deformation1", &objective, 2.0, 6, &config(20), 1e-7).unwrap();
    assert_eq!(r.min_segments, Some(4));
    assert_eq!(r.records.len(), 4);
    assert!(r.records[..3].iter().all(|x| x.best_infidelity > 1e-7));

    let objective = prepare_objective(&static_problem()).unwrap();
    let r = min_segments("static", &objective, 1.0, 4, &config(2), 1e-7).unwrap();
    assert_eq!(r.min_segments, Some(1));
}

#[test]
fn baselines() {
    let flat = baseline_for(&static_problem(), &[0.5, 1.0], 100).unwrap();
    assert!(flat.points.iter().all(|p| p.infidelity.abs() < 1e-12));

    let slow = baseline_for(&preset("creation").unwrap(), &[1000.0], 10_000).unwrap();
    assert!(slow.points[0].infidelity <= 1e-6, "{:e}", slow.points[0].infidelity);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("baseline.json");
    emit(&flat, &path, Format::Json).unwrap();
    assert_eq!(load_json::<BaselineCurve>(&path).unwrap(), flat);
}

#[test]
fn table_rows() {
    let empty = table_report(&[], &config(1), 1e-7, 1000);
    assert!(empty.rows.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    emit(&empty, &path, Format::Csv).unwrap();
    let t = read_csv(&path).unwrap();
    assert!(t.rows.is_empty());
    assert_eq!(t.header[0], "problem");

    let entry = TableEntry {
        problem: preset("creation").unwrap(),
        grid: time_grid(1.1, 1.3, 0.05).unwrap(),
        sweep_segments: 2,
        max_segments: 3,
    };
    let cfg = config(10);
    let report = table_report(std::slice::from_ref(&entry), &cfg, 1e-7, 1000);
    let row = &report.rows[0];
    assert_eq!(row.spins, 9);
    assert_eq!(row.error, None);

    // the row agrees with running its steps separately
    let objective = prepare_objective(&entry.problem).unwrap();
    let s = sweep("creation", &objective, entry.problem.target, &entry.grid, 2, &cfg, 1e-7, 1000).unwrap();
    assert_eq!(row.drop_time, s.drop_time);
    if let Some(t) = s.drop_time {
        let m = min_segments("creation", &objective, t, 3, &cfg, 1e-7).unwrap();
        assert_eq!(row.min_segments, m.min_segments);
        assert_eq!(row.infidelity_opt, m.records.last().map(|r| r.best_infidelity));
    }

    let path = dir.path().join("table.json");
    emit(&report, &path, Format::Json).unwrap();
    assert_eq!(load_json::<TableReport>(&path).unwrap(), report);
}

#[test]
fn failing_problem_is_reported_in_its_row() {
    let entry = TableEntry {
        problem: preset("injection2").unwrap(),
        grid: vec![1.0],
        sweep_segments: 2,
        max_segments: 2,
    };
    let report = table_report(&[entry], &config(1), 1e-7, 1000);
    assert_eq!(report.rows.len(), 1);
    if let Some(e) = &report.rows[0].error {
        assert!(!e.is_empty());
    }
}

#[test]
fn solve_records_settings() {
    let r = solve(&preset("deformation1").unwrap(), 2.0, 4, &config(3), None).unwrap();
    assert_eq!(r.report.per_restart.len(), 3);
    assert_eq!(r.config.restarts, 3);
    assert!((r.infidelity_linear - 0.3233).abs() < 1e-3);
}

#[test]
fn detachment_block_report() {
    let r = block_report(&preset("detachment").unwrap(), Default::default()).unwrap();
    assert_eq!(r.sectors, 256);
    assert_eq!(r.blocks.len(), 16);
    assert!(r.blocks.iter().all(|b| b.multiplicity == 16 && b.dim == 16));
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["blocks"].as_array().unwrap().len(), 16);
}

#[test]
fn catalog_lists_presets() {
    let c = catalog().unwrap();
    let names: Vec<&str> = c.entries.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(names.len(), 4);
    let creation = c.entries.iter().find(|e| e.name == "creation").unwrap();
    assert_eq!((creation.spins, creation.control_terms), (9, 7));
    assert_eq!(creation.symmetry_sites, vec![1, 9]);
}
