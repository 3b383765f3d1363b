//! First-order-bound iteration on the Poincaré ball.
//!
//! Each step minimizes a quadratic upper bound of the objective whose
//! minimizer has a closed form: with
//! `α_l = w_l·g(u_l)/(1 − |K|‖x_l‖²)`, `a = Σα`, `b = Σαx`, `c = Σα‖x‖²`,
//! the next iterate is the smaller root `y = 2b/(p + √(p² − 4|K|‖b‖²))`
//! with `p = a + |K|c`.

use nalgebra::DVector;

use super::{drive, DriverOptions, Observer, SolveConfig, SolveReport};
use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};
use crate::manifold::Model;
use crate::scalar::{acosh1p, weight_factor};

/// Solves for the weighted Fréchet mean of a Poincaré cloud.
pub fn solve_poincare(cloud: &WeightedPointCloud, config: &SolveConfig) -> Result<SolveReport> {
    solve_observed(cloud, config, &mut |_, _| false)
}

pub(crate) fn solve_observed(
    cloud: &WeightedPointCloud,
    config: &SolveConfig,
    observer: &mut Observer<'_>,
) -> Result<SolveReport> {
    let g = cloud.geometry();
    if g.model() != Model::Poincare {
        return Err(Error::ModelMismatch { left: g.model(), right: Model::Poincare });
    }
    let c = -g.k();
    let norms: Vec<f64> = cloud.points().iter().map(|x| x.norm_squared()).collect();
    let mut step = |y: &DVector<f64>| -> Result<(DVector<f64>, f64)> {
        let ny = y.norm_squared();
        let my = 1.0 - c * ny;
        let (mut a, mut cc, mut f) = (0.0, 0.0, 0.0);
        let mut b = DVector::zeros(y.len());
        for ((x, w), nx) in cloud.points().iter().zip(cloud.weights()).zip(&norms) {
            let mx = 1.0 - c * nx;
            let u = c * (x - y).norm_squared() / (mx * my);
            let d = acosh1p(2.0 * u)?;
            f += w * d * d / c;
            // g(u) = 2·h(2u), with h the arccosh weight factor
            let alpha = w * 2.0 * weight_factor(2.0 * u) / mx;
            a += alpha;
            b.axpy(alpha, x, 1.0);
            cc += alpha * nx;
        }
        let p = a + c * cc;
        let disc = (p * p - 4.0 * c * b.norm_squared()).max(0.0);
        Ok((b * (2.0 / (p + disc.sqrt())), f))
    };
    drive(cloud, config, DriverOptions { baseline: false }, &mut step, observer)
}
