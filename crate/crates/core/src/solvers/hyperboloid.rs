//! First-order-bound iteration on the hyperboloid.
//!
//! `u = Σ w_l·h(K⟨x_l, y⟩_L − 1)·x_l`, then `y = u/√(−|K|⟨u,u⟩_L)`, where
//! `h(z) = 2·arccosh(1 + z)/√(z(2 + z))` takes its limit 2 when a point
//! coincides with the iterate.

use nalgebra::DVector;

use super::{drive, DriverOptions, Observer, SolveConfig, SolveReport};
use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};
use crate::manifold::hyperboloid::{cosh_excess, inner};
use crate::manifold::Model;
use crate::scalar::{acosh1p, weight_factor};

/// Solves for the weighted Fréchet mean of a hyperboloid cloud.
pub fn solve_hyperboloid(cloud: &WeightedPointCloud, config: &SolveConfig) -> Result<SolveReport> {
    solve_observed(cloud, config, &mut |_, _| false)
}

pub(crate) fn solve_observed(
    cloud: &WeightedPointCloud,
    config: &SolveConfig,
    observer: &mut Observer<'_>,
) -> Result<SolveReport> {
    let g = cloud.geometry();
    if g.model() != Model::Hyperboloid {
        return Err(Error::ModelMismatch { left: g.model(), right: Model::Hyperboloid });
    }
    let k = g.k();
    let c = -k;
    let mut step = |y: &DVector<f64>| -> Result<(DVector<f64>, f64)> {
        let mut u = DVector::zeros(y.len());
        let mut f = 0.0;
        for (x, w) in cloud.points().iter().zip(cloud.weights()) {
            let z = cosh_excess(x, y, k);
            let d = acosh1p(z)?;
            f += w * d * d / c;
            u.axpy(w * weight_factor(z), x, 1.0);
        }
        let scale = (-c * inner(&u, &u)).sqrt();
        Ok((u / scale, f))
    };
    drive(cloud, config, DriverOptions { baseline: false }, &mut step, observer)
}
