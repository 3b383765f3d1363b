//! Iterations-to-reference benchmark of the forward solvers.

use std::time::{Duration, Instant};

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::{gen_points, mean_std, trial_rng, BenchConfig};
use crate::cloud::WeightedPointCloud;
use crate::error::Result;
use crate::solvers::{solve_frechet, solve_with, SolveConfig, SolverKind, Termination};

/// Per-trial outcome of one solver.
#[derive(Clone, Debug, Serialize)]
pub struct SolverTrial {
    pub solver: SolverKind,
    /// Iterations until within `epsilon_target` of the reference; `None` if never.
    pub iterations: Option<usize>,
    pub time_s: f64,
    pub termination: Termination,
    /// Learning rate picked by the grid search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_lr: Option<f64>,
}

/// All solvers on one trial.
#[derive(Clone, Debug, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    /// Iterations the reference solve took at tolerance 1e-15.
    pub reference_iterations: usize,
    /// Distance between the reference and a tightly converged grid-searched RGD run.
    pub reference_crosscheck: Option<f64>,
    pub solvers: Vec<SolverTrial>,
}

/// Aggregate row per solver.
#[derive(Clone, Debug, Serialize)]
pub struct ForwardRow {
    pub solver: SolverKind,
    pub mean_iters: f64,
    pub std_iters: f64,
    pub mean_time_s: f64,
    pub std_time_s: f64,
    pub converged_trials: usize,
    pub trials: usize,
    /// Set when any trial failed to reach the reference.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForwardReport {
    pub config: BenchConfig,
    pub rows: Vec<ForwardRow>,
    pub trials: Vec<TrialResult>,
}

fn run_counted(
    kind: SolverKind,
    cloud: &WeightedPointCloud,
    reference: &DVector<f64>,
    config: &BenchConfig,
    lr: Option<f64>,
) -> Result<(Option<usize>, Duration, Termination)> {
    let cap = if kind == SolverKind::Ours { config.ours_cap } else { config.baseline_cap };
    let solve = SolveConfig {
        max_iters: cap,
        step_tol: 0.0,
        learning_rate: lr,
        stall_window: (kind != SolverKind::Ours).then_some(config.stall_window),
        ..Default::default()
    };
    let mut hit = None;
    let eps = config.epsilon_target;
    let start = Instant::now();
    let report = solve_with(kind, cloud, &solve, &mut |k, y| {
        if (y - reference).norm() <= eps {
            hit = Some(k);
            true
        } else {
            false
        }
    })?;
    Ok((hit, start.elapsed(), report.termination))
}

fn run_trial(config: &BenchConfig, trial: usize) -> Result<TrialResult> {
    let cloud = gen_points(config.geometry()?, config.dim, config.points, config.scale, &mut trial_rng(config.seed, trial as u64))?;
    let reference_report = solve_frechet(&cloud, &SolveConfig { max_iters: 1000, step_tol: 1e-15, ..Default::default() })?;
    let reference = reference_report.mean.coords().clone();
    let mut solvers = Vec::new();
    let mut crosscheck = None;
    for &kind in &config.solvers {
        match kind {
            SolverKind::RgdGrid => {
                let start = Instant::now();
                let mut best: Option<(usize, f64, Termination)> = None;
                let mut last = Termination::MaxIterations;
                for lr in config.lr_grid.values() {
                    let (hit, _, term) = run_counted(SolverKind::Rgd, &cloud, &reference, config, Some(lr))?;
                    last = term;
                    if let Some(k) = hit {
                        if best.is_none_or(|(b, _, _)| k < b) {
                            best = Some((k, lr, term));
                        }
                    }
                }
                if let Some((_, lr, _)) = best {
                    let tight = SolveConfig { max_iters: config.baseline_cap, step_tol: 1e-15, learning_rate: Some(lr), ..Default::default() };
                    let r = solve_with(SolverKind::Rgd, &cloud, &tight, &mut |_, _| false)?;
                    crosscheck = Some((r.mean.coords() - &reference).norm());
                }
                solvers.push(SolverTrial {
                    solver: kind,
                    iterations: best.map(|b| b.0),
                    time_s: start.elapsed().as_secs_f64(),
                    termination: best.map_or(last, |b| b.2),
                    best_lr: best.map(|b| b.1),
                });
            }
            _ => {
                let lr = (kind == SolverKind::Rgd).then_some(config.rgd_lr);
                let (hit, time, termination) = run_counted(kind, &cloud, &reference, config, lr)?;
                solvers.push(SolverTrial { solver: kind, iterations: hit, time_s: time.as_secs_f64(), termination, best_lr: None });
            }
        }
    }
    Ok(TrialResult { trial, reference_iterations: reference_report.iterations, reference_crosscheck: crosscheck, solvers })
}

/// Runs every configured solver on `trials` random clouds and counts
/// iterations until the iterate is within `epsilon_target` (ambient norm)
/// of a reference mean solved at tolerance 1e-15.
pub fn bench_forward(config: &BenchConfig) -> Result<ForwardReport> {
    config.validate()?;
    let trials: Vec<TrialResult> = (0..config.trials).into_par_iter().map(|t| run_trial(config, t)).collect::<Result<_>>()?;
    let rows = config
        .solvers
        .iter()
        .enumerate()
        .map(|(j, &solver)| {
            let iters: Vec<f64> = trials.iter().filter_map(|t| t.solvers[j].iterations.map(|k| k as f64)).collect();
            let times: Vec<f64> = trials.iter().map(|t| t.solvers[j].time_s).collect();
            let (mean_iters, std_iters) = mean_std(&iters);
            let (mean_time_s, std_time_s) = mean_std(&times);
            ForwardRow {
                solver,
                mean_iters,
                std_iters,
                mean_time_s,
                std_time_s,
                converged_trials: iters.len(),
                trials: trials.len(),
                flagged: iters.len() < trials.len(),
            }
        })
        .collect();
    Ok(ForwardReport { config: config.clone(), rows, trials })
}
