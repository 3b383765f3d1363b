//! Weighted Fréchet objective and the forward solvers.
//!
//! [`solve_poincare`] and [`solve_hyperboloid`] are the first-order-bound
//! iterations: each step minimizes a quadratic majorizer of the objective,
//! so the objective decreases monotonically and no step size is needed.
//! [`solve_rgd`] (Riemannian gradient descent) and [`solve_karcher`]
//! (tangent-space averaging) are the usual baselines.

mod hyperboloid;
mod poincare;
mod tangent;

use std::time::{Duration, Instant};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};
use crate::manifold::{Geometry, ManifoldPoint, Model};

pub use hyperboloid::solve_hyperboloid;
pub use poincare::solve_poincare;
pub use tangent::{solve_karcher, solve_rgd};

/// Objective increases in a row that abort a run as diverged.
pub const DIVERGENCE_RUN: usize = 10;

/// How the first iterate is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// `y₀ = x⁽¹⁾`.
    #[default]
    FirstPoint,
    /// The point with the largest weight (first one on ties).
    MaxWeightPoint,
    /// One Karcher-flow step from the first point.
    OneKarcherStep,
}

/// Stopping and initialization parameters shared by all solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub max_iters: usize,
    /// Stop once `‖y_{k+1} − y_k‖₂ ≤ step_tol`.
    pub step_tol: f64,
    pub init: InitStrategy,
    /// Step size for [`solve_rgd`].
    pub learning_rate: Option<f64>,
    /// Give up after this many iterations without a new best objective.
    /// Only the baselines use it; the bound solvers are monotone.
    pub stall_window: Option<usize>,
    /// Baselines abort after [`DIVERGENCE_RUN`] consecutive objective increases.
    pub abort_on_divergence: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { max_iters: 1000, step_tol: 1e-12, init: InitStrategy::FirstPoint, learning_rate: None, stall_window: None, abort_on_divergence: true }
    }
}

impl SolveConfig {
    /// Default config with the given tolerance.
    pub fn with_tol(step_tol: f64) -> Self {
        SolveConfig { step_tol, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        if !(self.step_tol >= 0.0) {
            return Err(Error::InvalidInput("step_tol must be non-negative".into()));
        }
        Ok(())
    }
}

/// Why a solve stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    Diverged,
    Stalled,
    /// The observer asked to stop.
    Stopped,
}

/// Result of a forward solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub mean: ManifoldPoint,
    /// Number of updates performed.
    pub iterations: usize,
    /// `f(y_0), f(y_1), …` including the returned iterate.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    pub termination: Termination,
    pub wall_time: Duration,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    model: Model,
    curvature: f64,
    mean: Vec<f64>,
    iterations: usize,
    converged: bool,
    termination: Termination,
    wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective_trace: Option<&'a [f64]>,
}

impl SolveReport {
    /// JSON form; the objective trace is included only on request.
    pub fn to_json(&self, include_trace: bool) -> Result<String> {
        let g = self.mean.geometry();
        Ok(serde_json::to_string_pretty(&ReportJson {
            model: g.model(),
            curvature: g.k(),
            mean: self.mean.to_vec(),
            iterations: self.iterations,
            converged: self.converged,
            termination: self.termination,
            wall_time_s: self.wall_time.as_secs_f64(),
            objective_trace: include_trace.then_some(&self.objective_trace[..]),
        })?)
    }
}

/// Called with `(k, y_k)` before the first update and after each one;
/// returning `true` stops the solve.
pub type Observer<'a> = dyn FnMut(usize, &DVector<f64>) -> bool + 'a;

/// The baseline and bound solvers selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// The first-order-bound solver for the cloud's model.
    Ours,
    Karcher,
    Rgd,
    /// RGD with the learning rate picked by grid search (bench only).
    RgdGrid,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Ours => "ours",
            SolverKind::Karcher => "karcher",
            SolverKind::Rgd => "rgd",
            SolverKind::RgdGrid => "rgd_grid",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ours" => Ok(SolverKind::Ours),
            "karcher" => Ok(SolverKind::Karcher),
            "rgd" => Ok(SolverKind::Rgd),
            "rgd_grid" | "rgd-grid" => Ok(SolverKind::RgdGrid),
            other => Err(Error::InvalidInput(format!("unknown solver `{other}`"))),
        }
    }
}

/// `f(y) = Σ w_l d(x⁽ˡ⁾, y)²`.
pub fn frechet_objective(cloud: &WeightedPointCloud, y: &ManifoldPoint) -> Result<f64> {
    cloud.geometry().same_space(y.geometry())?;
    objective_raw(cloud, y.coords())
}

pub(crate) fn objective_raw(cloud: &WeightedPointCloud, y: &DVector<f64>) -> Result<f64> {
    let g = cloud.geometry();
    let mut f = 0.0;
    for (x, w) in cloud.points().iter().zip(cloud.weights()) {
        f += w * g.distance(x, y)?.powi(2);
    }
    Ok(f)
}

/// Fréchet variance: the objective at the solved mean with weights normalized to sum 1.
pub fn frechet_variance(cloud: &WeightedPointCloud) -> Result<f64> {
    let report = solve_frechet(cloud, &SolveConfig::with_tol(1e-13))?;
    Ok(frechet_objective(cloud, &report.mean)? / cloud.total_weight())
}

/// `‖Σ w_l log_y x⁽ˡ⁾‖_ρ`, zero exactly at the mean.
pub fn stationarity_residual(cloud: &WeightedPointCloud, y: &DVector<f64>) -> Result<f64> {
    let g = cloud.geometry();
    let mut acc = DVector::zeros(y.len());
    for (x, w) in cloud.points().iter().zip(cloud.weights()) {
        acc += g.log(y, x)? * *w;
    }
    g.norm(y, &acc)
}

/// Runs the bound solver for the cloud's model. Euclidean clouds use one
/// averaging step; Klein clouds are solved on the hyperboloid.
pub fn solve_frechet(cloud: &WeightedPointCloud, config: &SolveConfig) -> Result<SolveReport> {
    solve_frechet_observed(cloud, config, &mut |_, _| false)
}

/// [`solve_frechet`] with an observer.
pub fn solve_frechet_observed(
    cloud: &WeightedPointCloud,
    config: &SolveConfig,
    observer: &mut Observer<'_>,
) -> Result<SolveReport> {
    match cloud.geometry().model() {
        Model::Poincare => poincare::solve_observed(cloud, config, observer),
        Model::Hyperboloid => hyperboloid::solve_observed(cloud, config, observer),
        Model::Euclidean => tangent::karcher_observed(cloud, config, observer),
        Model::Klein => {
            let h = cloud.convert(Model::Hyperboloid)?;
            let mut r = hyperboloid::solve_observed(&h, config, observer)?;
            r.mean = crate::manifold::convert(&r.mean, Model::Klein)?;
            Ok(r)
        }
    }
}

/// Runs any solver kind; `RgdGrid` is not a single solve and is rejected.
pub fn solve_with(
    kind: SolverKind,
    cloud: &WeightedPointCloud,
    config: &SolveConfig,
    observer: &mut Observer<'_>,
) -> Result<SolveReport> {
    match kind {
        SolverKind::Ours => solve_frechet_observed(cloud, config, observer),
        SolverKind::Karcher => tangent::karcher_observed(cloud, config, observer),
        SolverKind::Rgd => tangent::rgd_observed(cloud, config, observer),
        SolverKind::RgdGrid => Err(Error::InvalidInput("grid search runs through the bench harness".into())),
    }
}

/// Starting iterate for the configured strategy.
pub(crate) fn initial_point(cloud: &WeightedPointCloud, init: InitStrategy) -> Result<DVector<f64>> {
    Ok(match init {
        InitStrategy::FirstPoint => cloud.points()[0].clone(),
        InitStrategy::MaxWeightPoint => {
            let mut best = 0;
            for (i, w) in cloud.weights().iter().enumerate() {
                if *w > cloud.weights()[best] {
                    best = i;
                }
            }
            cloud.points()[best].clone()
        }
        InitStrategy::OneKarcherStep => {
            let y = cloud.points()[0].clone();
            let g = cloud.geometry();
            g.exp(&y, &tangent::mean_log(cloud, &y)?)?
        }
    })
}

/// One update: maps `y_k` to `(y_{k+1}, f(y_k))`.
pub(crate) type StepFn<'a> = dyn FnMut(&DVector<f64>) -> Result<(DVector<f64>, f64)> + 'a;

pub(crate) struct DriverOptions {
    /// Baseline solvers: numerical blow-ups end the run as diverged, and the
    /// consecutive-increase rule applies when the config enables it.
    pub baseline: bool,
}

/// Shared iteration loop: bookkeeping, stopping rules and the observer.
pub(crate) fn drive(
    cloud: &WeightedPointCloud,
    config: &SolveConfig,
    opts: DriverOptions,
    step: &mut StepFn<'_>,
    observer: &mut Observer<'_>,
) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let g: Geometry = *cloud.geometry();
    let finish = |y: DVector<f64>, iterations, trace, termination| -> Result<SolveReport> {
        Ok(SolveReport {
            mean: ManifoldPoint::projected(g, y)?,
            iterations,
            objective_trace: trace,
            converged: termination == Termination::Converged,
            termination,
            wall_time: start.elapsed(),
        })
    };

    if cloud.all_identical() {
        let y = cloud.points()[0].clone();
        observer(0, &y);
        return finish(y, 0, vec![0.0], Termination::Converged);
    }

    let mut y = initial_point(cloud, config.init)?;
    let mut trace = Vec::new();
    if observer(0, &y) {
        trace.push(objective_raw(cloud, &y)?);
        return finish(y, 0, trace, Termination::Stopped);
    }

    let mut best = (f64::INFINITY, y.clone(), 0usize);
    let mut rises = 0usize;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;
    for k in 0..config.max_iters {
        let (next, f) = match step(&y) {
            Ok(r) => r,
            Err(Error::Boundary(_) | Error::ArccoshDomain(_) | Error::DegenerateDenominator(_)) if opts.baseline => {
                termination = Termination::Diverged;
                break;
            }
            Err(e) => return Err(e),
        };
        if !f.is_finite() || next.iter().any(|v| !v.is_finite()) {
            termination = Termination::Diverged;
            trace.push(f);
            break;
        }
        if let Some(&prev) = trace.last() {
            rises = if f > prev { rises + 1 } else { 0 };
        }
        trace.push(f);
        if f < best.0 {
            best = (f, y.clone(), k);
        }
        if opts.baseline && config.abort_on_divergence && rises >= DIVERGENCE_RUN {
            termination = Termination::Diverged;
            break;
        }
        if let Some(window) = config.stall_window {
            if k - best.2 >= window {
                termination = Termination::Stalled;
                break;
            }
        }
        let moved = (&next - &y).norm();
        y = next;
        iterations = k + 1;
        if observer(iterations, &y) {
            termination = Termination::Stopped;
            break;
        }
        if moved <= config.step_tol {
            termination = Termination::Converged;
            break;
        }
    }

    match termination {
        Termination::Converged | Termination::Stopped | Termination::MaxIterations => {
            let f = objective_raw(cloud, &y)?;
            trace.push(f);
            if termination == Termination::MaxIterations && best.0 < f {
                return finish(best.1, iterations, trace, termination);
            }
            finish(y, iterations, trace, termination)
        }
        Termination::Diverged | Termination::Stalled => finish(best.1, iterations, trace, termination),
    }
}
