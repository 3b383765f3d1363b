//! Batch-norm demo: Euclidean equivalence check plus a hyperbolic run.

use nalgebra::DVector;
use serde::Serialize;

use super::{gen_points, trial_rng, BenchConfig};
use crate::batch_norm::{batch_statistics, BatchNormState, ProductBatchNorm, DEFAULT_EPSILON};
use crate::error::Result;
use crate::manifold::{Geometry, ManifoldPoint};
use crate::solvers::SolveConfig;

/// Tolerance of the Euclidean equivalence check.
pub const RBN_EQUIVALENCE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct RbnDemoReport {
    /// Max abs difference to per-feature batch normalization over all steps.
    pub euclidean_max_abs_diff: f64,
    pub euclidean_passed: bool,
    /// Per hyperbolic training step: distance of the output mean to `μ'`.
    pub hyperbolic_mean_offset: Vec<f64>,
    /// Per hyperbolic training step: output variance and its target `σ'²`.
    pub hyperbolic_variance: Vec<[f64; 2]>,
    /// Final state of the hyperbolic run.
    pub hyperbolic_state: serde_json::Value,
}

fn textbook(batch: &[DVector<f64>], gamma: f64, beta: &DVector<f64>, eps: f64) -> Vec<DVector<f64>> {
    let m = batch.len() as f64;
    let n = batch[0].len();
    let mu = batch.iter().fold(DVector::zeros(n), |a, x| a + x) / m;
    let var = batch.iter().fold(DVector::zeros(n), |a, x| a + (x - &mu).map(|d| d * d)) / m;
    batch
        .iter()
        .map(|x| DVector::from_fn(n, |j, _| gamma * (x[j] - mu[j]) / (var[j] + eps).sqrt() + beta[j]))
        .collect()
}

/// Trains on `trials` batches of `points` points each.
pub fn rbn_demo(config: &BenchConfig) -> Result<RbnDemoReport> {
    config.validate()?;
    let gamma2 = 0.49;
    let beta = DVector::from_fn(config.dim, |j, _| 0.1 * j as f64 - 0.3);
    let mut product = ProductBatchNorm::new(beta.as_slice(), gamma2, 0.9, DEFAULT_EPSILON)?;
    let mut worst: f64 = 0.0;
    for t in 0..config.trials {
        let batch = gen_points(Geometry::euclidean(), config.dim, config.points, 1.0, &mut trial_rng(config.seed, t as u64))?;
        let ours = product.train_step(&batch)?;
        let reference = textbook(batch.points(), gamma2.sqrt(), &beta, DEFAULT_EPSILON);
        for (a, b) in ours.points().iter().zip(&reference) {
            worst = worst.max((a - b).amax());
        }
    }

    let g = config.geometry()?;
    let target = ManifoldPoint::origin(g, config.dim);
    let mut state = BatchNormState::new(&target, 0.25, 0.9)?;
    let stats = SolveConfig { max_iters: 2000, step_tol: 1e-13, ..Default::default() };
    let mut offsets = Vec::new();
    let mut variances = Vec::new();
    for t in 0..config.trials {
        let batch = gen_points(g, config.dim, config.points, config.scale, &mut trial_rng(config.seed ^ 0x5eed, t as u64))?;
        let out = state.train_step(&batch)?;
        let (mu, var) = batch_statistics(&out, &stats)?;
        offsets.push(g.distance(&mu, target.coords())?);
        variances.push([var, state.target_variance]);
    }
    Ok(RbnDemoReport {
        euclidean_max_abs_diff: worst,
        euclidean_passed: worst <= RBN_EQUIVALENCE_TOL,
        hyperbolic_mean_offset: offsets,
        hyperbolic_variance: variances,
        hyperbolic_state: serde_json::from_str(&state.to_json()?)?,
    })
}
