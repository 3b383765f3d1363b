//! Central finite differences of the re-solved mean, used as a test oracle.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};
use crate::manifold::{hyperboloid, Model};
use crate::solvers::{solve_frechet, SolveConfig};

/// Which input to perturb.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perturbation {
    /// Point `i`. On the hyperboloid the columns correspond to the tangent
    /// projections of the ambient basis vectors, pushed through `exp`, so the
    /// result approximates `J·P_T` with `P_T = I − K·x·xᵀM`.
    Point(usize),
    /// One column per weight.
    Weight,
    /// A single column; hyperboloid points keep their spatial coordinates.
    Curvature,
}

/// `‖A − F‖_F / ‖F‖_F`.
pub fn relative_error(analytic: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    (analytic - reference).norm() / reference.norm().max(f64::MIN_POSITIVE)
}

fn solve_mean(cloud: &WeightedPointCloud, config: &SolveConfig) -> Result<DVector<f64>> {
    let r = solve_frechet(cloud, config)?;
    if !r.converged {
        return Err(Error::NotConverged(format!("inner solve stopped after {} iterations ({:?})", r.iterations, r.termination)));
    }
    Ok(r.mean.into_coords())
}

fn relift(cloud: &WeightedPointCloud, k: f64) -> Result<WeightedPointCloud> {
    let g = cloud.geometry().with_curvature(k)?;
    let pts = cloud
        .points()
        .iter()
        .map(|x| match g.model() {
            Model::Hyperboloid => hyperboloid::lift(&x.as_slice()[1..], k),
            _ => x.clone(),
        })
        .collect();
    WeightedPointCloud::new(g, pts, cloud.weights().to_vec())
}

/// Central differences `(μ(θ + h) − μ(θ − h))/2h` with every perturbed
/// cloud re-solved under `config`. Columns are computed in parallel and
/// assembled in a fixed order, so the result does not depend on scheduling.
pub fn finite_difference_jacobian(
    cloud: &WeightedPointCloud,
    which: Perturbation,
    h: f64,
    config: &SolveConfig,
) -> Result<DMatrix<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    let g = *cloud.geometry();
    let rows = cloud.ambient_dim();
    let perturbed: Vec<(WeightedPointCloud, WeightedPointCloud)> = match which {
        Perturbation::Point(i) => {
            if i >= cloud.len() {
                return Err(Error::InvalidInput(format!("point index {i} out of range")));
            }
            let x = &cloud.points()[i];
            (0..rows)
                .map(|col| {
                    let mut e = DVector::zeros(rows);
                    e[col] = 1.0;
                    let shift = |sign: f64| -> Result<WeightedPointCloud> {
                        let mut pts = cloud.points().to_vec();
                        pts[i] = match g.model() {
                            Model::Hyperboloid => g.project(&g.exp(x, &(g.project_tangent(x, &e) * (sign * h)))?),
                            _ => x + &e * (sign * h),
                        };
                        cloud.with_points(pts)
                    };
                    Ok((shift(1.0)?, shift(-1.0)?))
                })
                .collect::<Result<_>>()?
        }
        Perturbation::Weight => (0..cloud.len())
            .map(|i| {
                let shift = |sign: f64| {
                    let mut w = cloud.weights().to_vec();
                    w[i] += sign * h;
                    cloud.with_weights(w)
                };
                Ok((shift(1.0)?, shift(-1.0)?))
            })
            .collect::<Result<_>>()?,
        Perturbation::Curvature => {
            if g.model() == Model::Euclidean {
                return Ok(DMatrix::zeros(rows, 1));
            }
            vec![(relift(cloud, g.k() + h)?, relift(cloud, g.k() - h)?)]
        }
    };
    let columns: Vec<DVector<f64>> = perturbed
        .par_iter()
        .map(|(plus, minus)| Ok((solve_mean(plus, config)? - solve_mean(minus, config)?) / (2.0 * h)))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_columns(&columns))
}
