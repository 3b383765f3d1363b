//! Analytic Jacobians against central finite differences on random clouds.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{gen_points, trial_rng, DEFAULT_SCALE};
use crate::error::Result;
use crate::grad::{finite_difference_jacobian, frechet_jacobians, relative_error, Perturbation};
use crate::manifold::{hyperboloid::metric_apply, Geometry, Model};
use crate::solvers::{solve_frechet, SolveConfig};

/// Relative error above which `grad-check` fails.
pub const GRAD_CHECK_LIMIT: f64 = 1e-4;

/// Grid of configurations to check.
#[derive(Clone, Debug, Serialize)]
pub struct GradCheckConfig {
    pub models: Vec<Model>,
    pub curvatures: Vec<f64>,
    pub dims: Vec<usize>,
    pub points: Vec<usize>,
    pub seed: u64,
    pub h: f64,
    pub scale: f64,
    /// Harness self-test: perturbs every analytic Jacobian by 0.1%.
    pub corrupt: bool,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig {
            models: vec![Model::Poincare, Model::Hyperboloid],
            curvatures: vec![-0.5, -1.0, -2.0],
            dims: vec![2, 8, 16],
            points: vec![2, 5, 10],
            seed: 0,
            h: 1e-6,
            scale: DEFAULT_SCALE,
            corrupt: false,
        }
    }
}

/// One comparison.
#[derive(Clone, Debug, Serialize)]
pub struct GradCase {
    pub model: Model,
    pub curvature: f64,
    pub dim: usize,
    pub points: usize,
    /// `points`, `weights` or `curvature`.
    pub op: String,
    pub rel_error: f64,
    pub hessian_condition: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradCheckReport {
    /// Worst relative error per `model/op`.
    pub max_rel_error: BTreeMap<String, f64>,
    /// Hessian condition numbers per `model`: `[min, max]`.
    pub hessian_condition: BTreeMap<String, [f64; 2]>,
    pub limit: f64,
    pub passed: bool,
    pub cases: Vec<GradCase>,
}

fn check_one(cfg: &GradCheckConfig, model: Model, k: f64, n: usize, t: usize, index: u64) -> Result<Vec<GradCase>> {
    let g = Geometry::new(model, if model == Model::Euclidean { 0.0 } else { k })?;
    let mut rng = trial_rng(cfg.seed, index);
    let cloud = gen_points(g, n, t, cfg.scale, &mut rng)?;
    let weights: Vec<f64> = (0..t).map(|_| rng.random_range(0.5..1.5)).collect();
    let cloud = cloud.with_weights(weights)?;
    let solve = SolveConfig { max_iters: 20_000, step_tol: (cfg.h * cfg.h * 1e-2).min(1e-14), ..Default::default() };
    let mean = solve_frechet(&cloud, &solve)?.mean;
    let jac = frechet_jacobians(&cloud, &mean)?;
    let bump = if cfg.corrupt { 1.0 + 1e-3 } else { 1.0 };

    let mut point_err: f64 = 0.0;
    for i in 0..t {
        let fd = finite_difference_jacobian(&cloud, Perturbation::Point(i), cfg.h, &solve)?;
        let analytic = if model == Model::Hyperboloid {
            let x = &cloud.points()[i];
            let tangent = DMatrix::identity(x.len(), x.len()) - x * metric_apply(x).transpose() * k;
            &jac.per_point[i] * tangent
        } else {
            jac.per_point[i].clone()
        };
        point_err = point_err.max(relative_error(&(analytic * bump), &fd));
    }
    let fd_w = finite_difference_jacobian(&cloud, Perturbation::Weight, cfg.h, &solve)?;
    let weight_err = relative_error(&(DMatrix::from_columns(&jac.per_weight) * bump), &fd_w);
    let mut cases = Vec::new();
    let mut push = |op: &str, rel_error: f64| {
        cases.push(GradCase { model, curvature: g.k(), dim: n, points: t, op: op.into(), rel_error, hessian_condition: jac.hessian_condition })
    };
    push("points", point_err);
    push("weights", weight_err);
    if model != Model::Euclidean {
        let fd_k = finite_difference_jacobian(&cloud, Perturbation::Curvature, cfg.h, &solve)?;
        let a: DVector<f64> = &jac.curvature_grad * bump;
        push("curvature", relative_error(&DMatrix::from_column_slice(a.len(), 1, a.as_slice()), &fd_k));
    }
    Ok(cases)
}

/// Runs every configuration of the grid and summarizes worst errors.
pub fn grad_check(cfg: &GradCheckConfig) -> Result<GradCheckReport> {
    let mut jobs = Vec::new();
    for &model in &cfg.models {
        let curvatures: &[f64] = if model == Model::Euclidean { &[0.0] } else { &cfg.curvatures };
        for &k in curvatures {
            for &n in &cfg.dims {
                for &t in &cfg.points {
                    jobs.push((model, k, n, t));
                }
            }
        }
    }
    let nested: Vec<Vec<GradCase>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &(m, k, n, t))| check_one(cfg, m, k, n, t, i as u64))
        .collect::<Result<_>>()?;
    let cases: Vec<GradCase> = nested.into_iter().flatten().collect();
    let mut max_rel_error = BTreeMap::new();
    let mut hessian_condition: BTreeMap<String, [f64; 2]> = BTreeMap::new();
    for c in &cases {
        let e = max_rel_error.entry(format!("{}/{}", c.model, c.op)).or_insert(0.0f64);
        *e = e.max(c.rel_error);
        let h = hessian_condition.entry(c.model.to_string()).or_insert([f64::INFINITY, 0.0]);
        h[0] = h[0].min(c.hessian_condition);
        h[1] = h[1].max(c.hessian_condition);
    }
    let passed = cases.iter().all(|c| c.rel_error <= GRAD_CHECK_LIMIT);
    Ok(GradCheckReport { max_rel_error, hessian_condition, limit: GRAD_CHECK_LIMIT, passed, cases })
}
