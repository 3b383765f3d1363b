//! Experiment harness behind the `frechet-bench` binary.
//!
//! Every command is deterministic given its seed: trial `i` draws from its
//! own RNG stream, trials run in parallel, and results are collected in
//! trial order. Timing fields are the only non-reproducible output.

mod forward;
mod gradcheck;
mod output;
mod pseudo_cmp;
mod rbn;
pub mod sample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{Geometry, Model};
use crate::solvers::SolverKind;

pub use forward::{bench_forward, ForwardReport, ForwardRow, TrialResult};
pub use gradcheck::{grad_check, GradCase, GradCheckConfig, GradCheckReport, GRAD_CHECK_LIMIT};
pub use output::{clouds_csv, forward_csv, gradcheck_csv, json, pseudo_csv, rbn_csv, Format, SCHEMA_VERSION};
pub use pseudo_cmp::{pseudo_compare, PseudoReport, PseudoRow};
pub use rbn::{rbn_demo, RbnDemoReport, RBN_EQUIVALENCE_TOL};
pub use sample::{gen_points, trial_rng};

/// Default standard deviation of the tangent-space Gaussian used to sample clouds.
pub const DEFAULT_SCALE: f64 = 0.4;

/// Inclusive learning-rate grid `start, start + step, …, stop`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl LrGrid {
    /// Default grid per model: 0.2–0.4 on the ball, 0.2–0.28 on the hyperboloid.
    pub fn default_for(model: Model) -> Self {
        match model {
            Model::Hyperboloid => LrGrid { start: 0.2, stop: 0.28, step: 0.01 },
            _ => LrGrid { start: 0.2, stop: 0.4, step: 0.01 },
        }
    }

    /// Grid values, rounded to suppress accumulation error.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12).collect()
    }

    /// Parses `start:stop:step`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad lr grid `{s}`: {e}"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [start, stop, step] if step > 0.0 && stop >= start && start > 0.0 => Ok(LrGrid { start, stop, step }),
            _ => Err(Error::InvalidInput(format!("lr grid must be start:stop:step with 0 < start <= stop, step > 0; got `{s}`"))),
        }
    }
}

/// Shared configuration of the bench commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub model: Model,
    pub curvature: f64,
    pub dim: usize,
    pub points: usize,
    pub trials: usize,
    pub seed: u64,
    pub epsilon_target: f64,
    pub solvers: Vec<SolverKind>,
    /// Learning rate of the plain RGD row.
    pub rgd_lr: f64,
    pub lr_grid: LrGrid,
    /// Sampling scale, see [`gen_points`].
    pub scale: f64,
    /// Iteration cap for the baselines.
    pub baseline_cap: usize,
    /// Iteration cap for the bound solvers.
    pub ours_cap: usize,
    /// Baselines stop after this many iterations without a new best objective.
    pub stall_window: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            model: Model::Poincare,
            curvature: -1.0,
            dim: 16,
            points: 10,
            trials: 10,
            seed: 0,
            epsilon_target: 1e-12,
            solvers: vec![SolverKind::Ours, SolverKind::Karcher, SolverKind::Rgd, SolverKind::RgdGrid],
            rgd_lr: 0.01,
            lr_grid: LrGrid::default_for(Model::Poincare),
            scale: DEFAULT_SCALE,
            baseline_cap: 50_000,
            ours_cap: 1000,
            stall_window: 5000,
        }
    }
}

impl BenchConfig {
    /// The geometry described by `model` and `curvature`.
    pub fn geometry(&self) -> Result<Geometry> {
        let k = if self.model == Model::Euclidean { 0.0 } else { self.curvature };
        Geometry::new(self.model, k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.dim == 0 || self.points == 0 {
            return Err(Error::InvalidInput("trials, dim and points must be positive".into()));
        }
        if !(self.epsilon_target > 0.0) {
            return Err(Error::InvalidInput("epsilon target must be positive".into()));
        }
        if !(self.scale > 0.0) {
            return Err(Error::InvalidInput("sampling scale must be positive".into()));
        }
        self.geometry().map(|_| ())
    }
}

/// Mean and sample standard deviation; `NaN` for empty input.
pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
