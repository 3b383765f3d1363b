//! Baselines that work through the tangent space at the iterate.

use nalgebra::DVector;

use super::{drive, objective_raw, DriverOptions, Observer, SolveConfig, SolveReport};
use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};

/// `(1/Σw)·Σ w_l log_y x⁽ˡ⁾`.
pub(crate) fn mean_log(cloud: &WeightedPointCloud, y: &DVector<f64>) -> Result<DVector<f64>> {
    let g = cloud.geometry();
    let mut acc = DVector::zeros(y.len());
    for (x, w) in cloud.points().iter().zip(cloud.weights()) {
        acc.axpy(*w, &g.log(y, x)?, 1.0);
    }
    Ok(g.project_tangent(y, &(acc / cloud.total_weight())))
}

/// Riemannian gradient descent `y ← exp_y(−lr·∇f̄(y))` on the normalized
/// objective `f̄ = f/Σw`, whose gradient is `−(2/Σw)·Σ w_l log_y x⁽ˡ⁾`.
pub fn solve_rgd(cloud: &WeightedPointCloud, config: &SolveConfig) -> Result<SolveReport> {
    rgd_observed(cloud, config, &mut |_, _| false)
}

/// Karcher flow: `y ← exp_y((1/Σw)·Σ w_l log_y x⁽ˡ⁾)`.
pub fn solve_karcher(cloud: &WeightedPointCloud, config: &SolveConfig) -> Result<SolveReport> {
    karcher_observed(cloud, config, &mut |_, _| false)
}

pub(crate) fn rgd_observed(
    cloud: &WeightedPointCloud,
    config: &SolveConfig,
    observer: &mut Observer<'_>,
) -> Result<SolveReport> {
    let lr = config
        .learning_rate
        .filter(|lr| lr.is_finite() && *lr > 0.0)
        .ok_or_else(|| Error::InvalidInput("RGD needs a positive learning rate".into()))?;
    tangent_flow(cloud, config, 2.0 * lr, observer)
}

pub(crate) fn karcher_observed(
    cloud: &WeightedPointCloud,
    config: &SolveConfig,
    observer: &mut Observer<'_>,
) -> Result<SolveReport> {
    tangent_flow(cloud, config, 1.0, observer)
}

fn tangent_flow(
    cloud: &WeightedPointCloud,
    config: &SolveConfig,
    scale: f64,
    observer: &mut Observer<'_>,
) -> Result<SolveReport> {
    let g = *cloud.geometry();
    let mut step = |y: &DVector<f64>| -> Result<(DVector<f64>, f64)> {
        let f = objective_raw(cloud, y)?;
        let v = mean_log(cloud, y)? * scale;
        Ok((g.project(&g.exp(y, &v)?), f))
    };
    drive(cloud, config, DriverOptions { baseline: true }, &mut step, observer)
}
