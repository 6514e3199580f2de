// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment orchestration behind the `colcm` binary: kernel tables, single
//! runs, time-step convergence sweeps and divisibility reports, each written
//! to an output directory.

use std::path::{Path, PathBuf};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::{analyze, DivisibilityReport};
use crate::config::SimulationConfig;
use crate::engine::{run, Trajectory};
use crate::error::{Error, Result};
use crate::kernel::{collision_weights, CouplingShape, WeightMatrix};
use crate::reference::{solve_dde, white_amplitude};

pub const WEIGHTS_FILE: &str = "weights.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const WITNESS_FILE: &str = "witness.json";

/// Files written by a command and messages meant for the user.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub messages: Vec<String>,
}

fn write(dir: &Path, name: &str, contents: &str, outcome: &mut Outcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    outcome.files.push(path);
    Ok(())
}

/// Discrete weights `W(l)` for the configured coupling and grid.
pub fn kernel_weights(config: &SimulationConfig) -> Result<WeightMatrix> {
    config.validate()?;
    let (n, _) = config.resolved_steps()?;
    collision_weights(&config.coupling.time_kernel(), config.dt, n)
}

pub fn cmd_kernel(config: &SimulationConfig, out_dir: &Path) -> Result<Outcome> {
    let weights = kernel_weights(config)?;
    let mut outcome = Outcome::default();
    outcome
        .messages
        .extend(weights.warnings().iter().map(|w| format!("warning: {w}")));
    write(out_dir, WEIGHTS_FILE, &weights.to_csv(), &mut outcome)?;
    Ok(outcome)
}

pub fn cmd_simulate(config: &SimulationConfig, out_dir: &Path) -> Result<(Trajectory, Outcome)> {
    let traj = run(config)?;
    let mut outcome = Outcome::default();
    outcome.messages.extend(traj.notes.iter().map(|n| format!("note: {n}")));
    write(out_dir, TRAJECTORY_FILE, &traj.to_csv(), &mut outcome)?;
    let summary = serde_json::to_string_pretty(&traj.summary())?;
    write(out_dir, SUMMARY_FILE, &(summary + "\n"), &mut outcome)?;
    Ok((traj, outcome))
}

/// One row of a time-step sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub n_steps: usize,
    pub max_abs_error: f64,
    /// `log2(e_prev / e) / log2(dt_prev / dt)`; absent on the first row.
    pub observed_order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// CSV `dt,n_steps,max_abs_error,observed_order`.
    pub fn to_csv(&self) -> String {
        use crate::fmt_f64 as f;
        let mut out = String::from("dt,n_steps,max_abs_error,observed_order\n");
        for r in &self.rows {
            let order = r.observed_order.map(f).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", f(r.dt), r.n_steps, f(r.max_abs_error), order);
        }
        out
    }
}

enum Reference {
    Mirror(crate::reference::DdeSolution),
    White { omega0: f64, gamma: f64 },
}

impl Reference {
    fn eval(&self, t: f64) -> Complex64 {
        match self {
            Reference::Mirror(sol) => sol.eval(t),
            Reference::White { omega0, gamma } => white_amplitude(*omega0, *gamma, t),
        }
    }
}

/// Largest `|ε_n - ε_ref(t_n)|` over a trajectory, rescaled by `ε(0)`.
pub fn max_grid_error(traj: &Trajectory, reference: impl Fn(f64) -> Complex64) -> f64 {
    let scale = traj.eps[0];
    traj.t
        .iter()
        .zip(&traj.eps)
        .map(|(&t, &e)| (e - scale * reference(t)).norm())
        .fold(0.0, f64::max)
}

/// Run the configuration at every `dt` in `dt_list` over a common horizon
/// and compare against the exact continuous-time amplitude.
///
/// Runs execute concurrently; rows come back in `dt_list` order.
pub fn convergence_table(config: &SimulationConfig, dt_list: &[f64]) -> Result<ConvergenceTable> {
    config.validate()?;
    if dt_list.is_empty() {
        return Err(Error::config("converge.dt_list", "must not be empty"));
    }
    let (n0, _) = config.resolved_steps()?;
    let horizon = config.t_max.unwrap_or(n0 as f64 * config.dt);
    let gamma = config.coupling.gamma();

    let reference = match config.coupling.shape() {
        CouplingShape::White => Reference::White {
            omega0: config.omega0,
            gamma,
        },
        CouplingShape::Mirror { phi, tau } => {
            if *tau <= 0.0 {
                return Err(Error::config(
                    "coupling.tau",
                    "convergence sweeps need tau > 0 for a mirror coupling",
                ));
            }
            for &dt in dt_list {
                let ratio = tau / dt;
                if ratio.round() < 1.0 || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
                    return Err(Error::config(
                        "converge.dt_list",
                        format!("dt = {dt} does not divide tau = {tau}"),
                    ));
                }
            }
            Reference::Mirror(solve_dde(config.omega0, gamma, *phi, *tau, horizon)?)
        }
        CouplingShape::Custom { .. } => {
            return Err(Error::config(
                "coupling.kind",
                "no exact reference exists for custom couplings",
            ))
        }
    };

    let configs = dt_list
        .iter()
        .map(|&dt| {
            let mut c = config.clone();
            c.dt = dt;
            c.n_steps = None;
            c.t_max = Some(horizon);
            c.validate().map(|_| c)
        })
        .collect::<Result<Vec<_>>>()?;

    let results: Vec<Result<(usize, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| {
                let reference = &reference;
                scope.spawn(move || {
                    let traj = run(c)?;
                    let err = max_grid_error(&traj, |t| reference.eval(t));
                    Ok((traj.len() - 1, err))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Internal("sweep worker panicked".into()))))
            .collect()
    });

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(dt_list.len());
    for (&dt, res) in dt_list.iter().zip(results) {
        let (n_steps, max_abs_error) = res?;
        let observed_order = rows.last().map(|prev: &ConvergenceRow| {
            (prev.max_abs_error / max_abs_error).log2() / (prev.dt / dt).log2()
        });
        rows.push(ConvergenceRow {
            dt,
            n_steps,
            max_abs_error,
            observed_order,
        });
    }
    Ok(ConvergenceTable { rows })
}

pub fn cmd_converge(
    config: &SimulationConfig,
    dt_list: Option<&[f64]>,
    out_dir: &Path,
) -> Result<(ConvergenceTable, Outcome)> {
    let list = match (dt_list, &config.converge) {
        (Some(l), _) => l.to_vec(),
        (None, Some(c)) => c.dt_list.clone(),
        (None, None) => {
            return Err(Error::config(
                "converge.dt_list",
                "no time steps given for the sweep",
            ))
        }
    };
    let table = convergence_table(config, &list)?;
    let mut outcome = Outcome::default();
    write(out_dir, CONVERGENCE_FILE, &table.to_csv(), &mut outcome)?;
    Ok((table, outcome))
}

#[derive(Serialize)]
struct WitnessFile<'a> {
    #[serde(flatten)]
    report: &'a DivisibilityReport,
    config: &'a SimulationConfig,
}

pub fn cmd_witness(config: &SimulationConfig, out_dir: &Path) -> Result<(DivisibilityReport, Outcome)> {
    let traj = run(config)?;
    let report = analyze(&traj)?;
    let mut outcome = Outcome::default();
    if let Some(note) = &report.note {
        outcome.messages.push(format!("note: {note}"));
    }
    let json = serde_json::to_string_pretty(&WitnessFile {
        report: &report,
        config,
    })?;
    write(out_dir, WITNESS_FILE, &(json + "\n"), &mut outcome)?;
    Ok((report, outcome))
}
