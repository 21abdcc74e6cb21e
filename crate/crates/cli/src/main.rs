// Copyright 2026 The defectctl Authors
// SPDX-License-Identifier: Apache-2.0

//! `defectctl`: run pulse-optimization experiments on stabilizer control
//! problems and write plot-ready CSV or JSON.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use defectctl_core::harness::{
    self, baseline_for, block_report, catalog, min_segments, solve, sweep, table_report, time_grid, Format, TableEntry,
    DEFAULT_EPSILON, DEFAULT_RAMP_SEGMENTS,
};
use defectctl_core::parallel::configure_threads;
use defectctl_core::{load_problem, preset, prepare_objective, ControlProblem, Error, Execution, OptimizerConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_THRESHOLD: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "defectctl", version, about = "Pulse optimization for surface-code defect operations")]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long, global = true, default_value = "json")]
    format: String,

    /// Worker threads for restarts and block targets (default: all cores).
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,

    /// Run restarts on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in problems.
    Catalog,
    /// Optimize a pulse at one duration and segment count.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        segments: usize,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        threshold: ThresholdArgs,
    },
    /// Optimize over a duration grid and report the drop time.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        t_step: f64,
        #[arg(long)]
        segments: usize,
        #[arg(long, default_value_t = DEFAULT_RAMP_SEGMENTS)]
        ramp_segments: usize,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        threshold: ThresholdArgs,
    },
    /// Linear-ramp infidelity over a duration grid.
    Baseline {
        #[command(flatten)]
        problem: ProblemArgs,
        /// `start:stop:step`, or a comma-separated list of durations.
        #[arg(long)]
        t_grid: String,
        #[arg(long, default_value_t = DEFAULT_RAMP_SEGMENTS)]
        ramp_segments: usize,
    },
    /// Symmetry sites, sector blocks and equivalence classes.
    Blocks {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Smallest segment count reaching the threshold at a fixed duration.
    MinSegments {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        time: f64,
        #[arg(long, default_value_t = 8)]
        max_segments: usize,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        threshold: ThresholdArgs,
    },
    /// Drop time, minimal segments and infidelities for several problems.
    Table {
        /// Comma-separated preset names.
        #[arg(long, value_delimiter = ',', required = true)]
        problems: Vec<String>,
        /// `start:stop:step`, or a comma-separated list of durations.
        #[arg(long)]
        t_grid: String,
        /// Segment count used while searching for the drop time.
        #[arg(long)]
        segments: usize,
        #[arg(long, default_value_t = 8)]
        max_segments: usize,
        #[arg(long, default_value_t = DEFAULT_RAMP_SEGMENTS)]
        ramp_segments: usize,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        threshold: ThresholdArgs,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ProblemArgs {
    /// Built-in problem name (see `catalog`).
    #[arg(long)]
    problem: Option<String>,
    /// JSON problem description.
    #[arg(long, value_name = "PATH")]
    problem_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OptimizerArgs {
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    /// Master seed; restart `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    max_iterations: usize,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    /// Target infidelity.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Exit with status 3 when the target infidelity is not reached.
    #[arg(long)]
    require_epsilon: bool,
}

impl ProblemArgs {
    fn load(&self) -> Result<ControlProblem, Error> {
        match (&self.problem, &self.problem_file) {
            (Some(name), None) => preset(name),
            (None, Some(path)) => load_problem(path),
            _ => unreachable!("clap enforces exactly one problem source"),
        }
    }
}

impl OptimizerArgs {
    fn config(&self, execution: Execution) -> Result<OptimizerConfig, Error> {
        let config = OptimizerConfig {
            restarts: self.restarts,
            master_seed: self.seed,
            max_iterations: self.max_iterations,
            execution,
            ..OptimizerConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

fn check_epsilon(epsilon: f64) -> Result<f64, Error> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(epsilon)
    } else {
        Err(Error::Validation(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::Validation(format!("cannot parse duration grid `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let v = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        return time_grid(v[0], v[1], v[2]);
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    let grid = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() || grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(bad());
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation("duration grid must be strictly ascending".into()));
    }
    Ok(grid)
}

/// Rendered output and whether the requested threshold was met.
struct Outcome {
    text: String,
    threshold_met: bool,
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let format: Format = cli.format.parse()?;
    let execution = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let done = |text: String| Outcome {
        text,
        threshold_met: true,
    };

    match &cli.command {
        Command::Catalog => Ok(done(harness::render(&catalog()?, format)?)),
        Command::Solve {
            problem,
            time,
            segments,
            optimizer,
            threshold,
        } => {
            let problem = problem.load()?;
            let config = optimizer.config(execution)?;
            let epsilon = check_epsilon(threshold.epsilon)?;
            let stop_at = threshold.require_epsilon.then_some(epsilon);
            let result = solve(&problem, *time, *segments, &config, stop_at)?;
            Ok(Outcome {
                threshold_met: !threshold.require_epsilon || result.report.best_infidelity <= epsilon,
                text: harness::render(&result, format)?,
            })
        }
        Command::Sweep {
            problem,
            t_min,
            t_max,
            t_step,
            segments,
            ramp_segments,
            optimizer,
            threshold,
        } => {
            let problem = problem.load()?;
            let config = optimizer.config(execution)?;
            let epsilon = check_epsilon(threshold.epsilon)?;
            let grid = time_grid(*t_min, *t_max, *t_step)?;
            let objective = prepare_objective(&problem)?;
            let result = sweep(
                &problem.name,
                &objective,
                problem.target,
                &grid,
                *segments,
                &config,
                epsilon,
                *ramp_segments,
            )?;
            Ok(Outcome {
                threshold_met: !threshold.require_epsilon || result.drop_time.is_some(),
                text: harness::render(&result, format)?,
            })
        }
        Command::Baseline {
            problem,
            t_grid,
            ramp_segments,
        } => {
            let problem = problem.load()?;
            let grid = parse_grid(t_grid)?;
            Ok(done(harness::render(&baseline_for(&problem, &grid, *ramp_segments)?, format)?))
        }
        Command::Blocks { problem } => {
            let problem = problem.load()?;
            Ok(done(harness::render(&block_report(&problem, execution)?, format)?))
        }
        Command::MinSegments {
            problem,
            time,
            max_segments,
            optimizer,
            threshold,
        } => {
            let problem = problem.load()?;
            let config = optimizer.config(execution)?;
            let epsilon = check_epsilon(threshold.epsilon)?;
            let objective = prepare_objective(&problem)?;
            let result = min_segments(&problem.name, &objective, *time, *max_segments, &config, epsilon)?;
            Ok(Outcome {
                threshold_met: !threshold.require_epsilon || result.min_segments.is_some(),
                text: harness::render(&result, format)?,
            })
        }
        Command::Table {
            problems,
            t_grid,
            segments,
            max_segments,
            ramp_segments,
            optimizer,
            threshold,
        } => {
            let config = optimizer.config(execution)?;
            let epsilon = check_epsilon(threshold.epsilon)?;
            let grid = parse_grid(t_grid)?;
            let entries = problems
                .iter()
                .map(|name| {
                    Ok(TableEntry {
                        problem: preset(name)?,
                        grid: grid.clone(),
                        sweep_segments: *segments,
                        max_segments: *max_segments,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let report = table_report(&entries, &config, epsilon, *ramp_segments);
            Ok(Outcome {
                threshold_met: !threshold.require_epsilon || report.rows.iter().all(|r| r.drop_time.is_some()),
                text: harness::render(&report, format)?,
            })
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_)
        | Error::Size { .. }
        | Error::SymmetryViolation(_)
        | Error::UnknownPreset { .. }
        | Error::DegenerateReference
        | Error::Configuration(_)
        | Error::NonHermitian { .. }
        | Error::Parse { .. }
        | Error::UnknownFormat(_) => EXIT_INVALID,
        Error::AdiabaticityFailure { .. } | Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_INVALID);
        }
        if let Err(e) = configure_threads(k) {
            eprintln!("error: cannot configure {k} threads: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }

    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(Error::from),
        None => {
            print!("{}", outcome.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    if !outcome.threshold_met {
        eprintln!("target infidelity not reached");
        return ExitCode::from(EXIT_THRESHOLD);
    }
    ExitCode::SUCCESS
}
