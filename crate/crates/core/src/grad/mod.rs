//! Analytic Jacobians of the weighted Fréchet mean with respect to the input
//! points, the weights and the curvature, by implicit differentiation of the
//! argmin, plus a finite-difference oracle.
//!
//! Poincaré Jacobians are `n×n` in ball coordinates. Hyperboloid Jacobians
//! are `(n+1)×(n+1)` in ambient coordinates; point and weight Jacobians
//! satisfy `ȳᵀM·J = 0`. Coincident points (`x⁽ⁱ⁾ = μ`) are handled through
//! the series limits of the weight factor, so `t = 1` yields the identity.

mod argmin;
mod fd;
mod hyperboloid;
mod poincare;

use nalgebra::{DMatrix, DVector};

use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};
use crate::manifold::{poincare::lambda, ManifoldPoint, Model};
use crate::solvers::stationarity_residual;

pub use argmin::{
    argmin_jacobian_constrained, argmin_jacobian_unconstrained, condition_number, ArgminDerivativeInputs,
    MAX_CONDITION,
};
pub use fd::{finite_difference_jacobian, relative_error, Perturbation};

use argmin::ConstrainedSolve;

/// Relative stationarity residual above which a point is not treated as the mean.
pub const STATIONARITY_LIMIT: f64 = 1e-6;

/// Derivatives of the mean with respect to every input.
#[derive(Clone, Debug)]
pub struct FrechetJacobians {
    /// `∂μ/∂x⁽ⁱ⁾`, one matrix per point.
    pub per_point: Vec<DMatrix<f64>>,
    /// `∂μ/∂w_i`, one vector per weight.
    pub per_weight: Vec<DVector<f64>>,
    /// `∂μ/∂K`.
    pub curvature_grad: DVector<f64>,
    pub solved_mean: ManifoldPoint,
    /// Condition estimate of the Hessian that was inverted.
    pub hessian_condition: f64,
}

/// Raw second-order terms at the mean.
pub(crate) struct Assembled {
    pub hessian: DMatrix<f64>,
    pub mixed: Vec<DMatrix<f64>>,
    pub weight_rhs: Vec<DVector<f64>>,
    pub curvature_rhs: DVector<f64>,
    pub constraint: Option<DMatrix<f64>>,
}

fn check_mean(cloud: &WeightedPointCloud, mean: &ManifoldPoint) -> Result<()> {
    cloud.geometry().same_space(mean.geometry())?;
    if mean.coords().len() != cloud.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: cloud.ambient_dim(), got: mean.coords().len() });
    }
    let residual = stationarity_residual(cloud, mean.coords())?;
    let limit = STATIONARITY_LIMIT * cloud.total_weight();
    if residual > limit {
        return Err(Error::NotStationary { residual, limit });
    }
    Ok(())
}

/// Hessian `∇²_yy f` at the mean (Lagrangian Hessian on the hyperboloid).
pub fn objective_hessian(cloud: &WeightedPointCloud, mean: &ManifoldPoint) -> Result<DMatrix<f64>> {
    check_mean(cloud, mean)?;
    Ok(match cloud.geometry().model() {
        Model::Poincare => poincare::assemble(cloud, mean.coords()).hessian,
        Model::Hyperboloid => hyperboloid::assemble(cloud, mean.coords()).hessian,
        Model::Euclidean => DMatrix::identity(mean.coords().len(), mean.coords().len()) * (2.0 * cloud.total_weight()),
        Model::Klein => return Err(Error::Unsupported { model: Model::Klein, op: "Jacobians" }),
    })
}

/// All Jacobians of the mean at once, sharing one factorization.
pub fn frechet_jacobians(cloud: &WeightedPointCloud, mean: &ManifoldPoint) -> Result<FrechetJacobians> {
    check_mean(cloud, mean)?;
    let y = mean.coords();
    let k = cloud.geometry().k();
    match cloud.geometry().model() {
        Model::Poincare => {
            let asm = poincare::assemble(cloud, y);
            let condition = condition_number(&asm.hessian);
            if !(condition <= MAX_CONDITION) {
                return Err(Error::IllConditioned { condition });
            }
            let lu = asm.hessian.clone().lu();
            let solve = |b: &DMatrix<f64>| -> Result<DMatrix<f64>> {
                lu.solve(b).map(|m| -m).ok_or(Error::IllConditioned { condition })
            };
            let per_point = asm.mixed.iter().map(&solve).collect::<Result<Vec<_>>>()?;
            let per_weight = asm
                .weight_rhs
                .iter()
                .map(|v| Ok(solve(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()))?.column(0).into_owned()))
                .collect::<Result<Vec<_>>>()?;
            let c = &asm.curvature_rhs;
            let curvature_grad = solve(&DMatrix::from_column_slice(c.len(), 1, c.as_slice()))?.column(0).into_owned();
            Ok(FrechetJacobians { per_point, per_weight, curvature_grad, solved_mean: mean.clone(), hessian_condition: condition })
        }
        Model::Hyperboloid => {
            let asm = hyperboloid::assemble(cloud, y);
            let a = asm.constraint.as_ref().expect("hyperboloid terms carry the constraint");
            let cs = ConstrainedSolve::new(&asm.hessian, a)?;
            let per_point: Vec<DMatrix<f64>> = asm.mixed.iter().map(|m| &cs.projector * m).collect();
            let per_weight = asm.weight_rhs.iter().map(|v| &cs.projector * v).collect();
            let r = DVector::from_element(1, -1.0 / (2.0 * k * k));
            let mut curvature_grad = cs.respond(&asm.curvature_rhs, &r);
            // input points move with K when their spatial coordinates are held fixed
            for (j, x) in per_point.iter().zip(cloud.points()) {
                curvature_grad += j.column(0) * (1.0 / (2.0 * k * k * x[0]));
            }
            Ok(FrechetJacobians { per_point, per_weight, curvature_grad, solved_mean: mean.clone(), hessian_condition: cs.condition })
        }
        Model::Euclidean => {
            let total = cloud.total_weight();
            let n = y.len();
            Ok(FrechetJacobians {
                per_point: cloud.weights().iter().map(|w| DMatrix::identity(n, n) * (w / total)).collect(),
                per_weight: cloud.points().iter().map(|x| (x - y) / total).collect(),
                curvature_grad: DVector::zeros(n),
                solved_mean: mean.clone(),
                hessian_condition: 1.0,
            })
        }
        Model::Klein => Err(Error::Unsupported { model: Model::Klein, op: "Jacobians" }),
    }
}

fn require(cloud: &WeightedPointCloud, model: Model) -> Result<()> {
    let m = cloud.geometry().model();
    if m != model {
        return Err(Error::ModelMismatch { left: m, right: model });
    }
    Ok(())
}

/// `∂μ/∂x⁽ⁱ⁾` on the Poincaré ball.
pub fn poincare_jacobian_points(cloud: &WeightedPointCloud, mean: &ManifoldPoint) -> Result<Vec<DMatrix<f64>>> {
    require(cloud, Model::Poincare)?;
    Ok(frechet_jacobians(cloud, mean)?.per_point)
}

/// `∂μ/∂w_i` on the Poincaré ball.
pub fn poincare_jacobian_weights(cloud: &WeightedPointCloud, mean: &ManifoldPoint) -> Result<Vec<DVector<f64>>> {
    require(cloud, Model::Poincare)?;
    Ok(frechet_jacobians(cloud, mean)?.per_weight)
}

/// `∂μ/∂K` on the Poincaré ball, with ball coordinates held fixed.
pub fn poincare_jacobian_curvature(cloud: &WeightedPointCloud, mean: &ManifoldPoint) -> Result<DVector<f64>> {
    require(cloud, Model::Poincare)?;
    Ok(frechet_jacobians(cloud, mean)?.curvature_grad)
}

/// Ambient `∂μ/∂x⁽ⁱ⁾` on the hyperboloid.
pub fn hyperboloid_jacobian_points(cloud: &WeightedPointCloud, mean: &ManifoldPoint) -> Result<Vec<DMatrix<f64>>> {
    require(cloud, Model::Hyperboloid)?;
    Ok(frechet_jacobians(cloud, mean)?.per_point)
}

/// Ambient `∂μ/∂w_i` on the hyperboloid.
pub fn hyperboloid_jacobian_weights(cloud: &WeightedPointCloud, mean: &ManifoldPoint) -> Result<Vec<DVector<f64>>> {
    require(cloud, Model::Hyperboloid)?;
    Ok(frechet_jacobians(cloud, mean)?.per_weight)
}

/// Ambient `∂μ/∂K` on the hyperboloid, with the spatial coordinates of the
/// inputs held fixed and their time coordinates re-lifted onto the new sheet.
pub fn hyperboloid_jacobian_curvature(cloud: &WeightedPointCloud, mean: &ManifoldPoint) -> Result<DVector<f64>> {
    require(cloud, Model::Hyperboloid)?;
    Ok(frechet_jacobians(cloud, mean)?.curvature_grad)
}

/// Gradients of a scalar loss with respect to every input of the mean.
#[derive(Clone, Debug)]
pub struct VjpResult {
    pub points: Vec<DVector<f64>>,
    pub weights: DVector<f64>,
    pub curvature: f64,
}

/// Pulls the ambient gradient `upstream = ∂L/∂μ` back through the mean.
///
/// With `metric_correct`, point gradients are turned into Riemannian
/// gradients: divided by `λ_x²` on the ball, mapped through `M` and
/// projected onto the tangent space on the hyperboloid.
pub fn vjp(cloud: &WeightedPointCloud, mean: &ManifoldPoint, upstream: &DVector<f64>, metric_correct: bool) -> Result<VjpResult> {
    if upstream.len() != mean.coords().len() {
        return Err(Error::DimensionMismatch { expected: mean.coords().len(), got: upstream.len() });
    }
    let jac = frechet_jacobians(cloud, mean)?;
    let g = cloud.geometry();
    let points = jac
        .per_point
        .iter()
        .zip(cloud.points())
        .map(|(j, x)| {
            let raw = j.transpose() * upstream;
            if !metric_correct {
                return raw;
            }
            match g.model() {
                Model::Poincare => raw / lambda(x, g.k()).powi(2),
                Model::Hyperboloid => {
                    g.project_tangent(x, &crate::manifold::hyperboloid::metric_apply(&raw))
                }
                _ => raw,
            }
        })
        .collect();
    let weights = DVector::from_iterator(cloud.len(), jac.per_weight.iter().map(|v| v.dot(upstream)));
    Ok(VjpResult { points, weights, curvature: jac.curvature_grad.dot(upstream) })
}
