//! Second derivatives of the hyperboloid objective
//! `f(y) = (1/|K|)·Σ w_l φ(K⟨x_l, y⟩_L)` under the constraint `⟨y,y⟩_L = 1/K`.
//!
//! The Hessian is that of the Lagrangian, `Σ w(−Kφ''·(Mx)(Mx)ᵀ + Kφ'·a·M)`
//! with `a = ⟨x, y⟩_L`, and the linearized constraint is `ȳᵀM·dy = r`.
//! Changing `K` moves the sheet itself: the constraint value changes
//! (`r = −1/(2K²)`) and, with spatial coordinates held fixed, every input
//! point's time coordinate shifts by `1/(2K²x₀)`.

use nalgebra::{DMatrix, DVector};

use super::Assembled;
use crate::cloud::WeightedPointCloud;
use crate::manifold::hyperboloid::{inner, metric_apply};
use crate::scalar::{weight_factor, weight_factor_derivative};

pub(crate) fn assemble(cloud: &WeightedPointCloud, y: &DVector<f64>) -> Assembled {
    let k = cloud.geometry().k();
    let n = y.len();
    let my = metric_apply(y);
    let mut metric = DMatrix::identity(n, n);
    metric[(0, 0)] = -1.0;

    let mut hessian = DMatrix::zeros(n, n);
    let mut mixed = Vec::with_capacity(cloud.len());
    let mut weight_rhs = Vec::with_capacity(cloud.len());
    let mut curvature_rhs = DVector::zeros(n);
    for (x, &w) in cloud.points().iter().zip(cloud.weights()) {
        let a = inner(x, y);
        let z = crate::manifold::hyperboloid::cosh_excess(x, y, k);
        let dphi = weight_factor(z);
        let ddphi = weight_factor_derivative(z);
        let mx = metric_apply(x);
        hessian += (&mx * mx.transpose() * (-k * ddphi) + &metric * (k * dphi * a)) * w;
        mixed.push(-(&mx * my.transpose() * (k * ddphi) + &metric * dphi) * w);
        weight_rhs.push(&mx * -dphi);
        curvature_rhs -= &mx * (w * ddphi * a);
    }
    Assembled { hessian, mixed, weight_rhs, curvature_rhs, constraint: Some(DMatrix::from_row_slice(1, n, my.as_slice())) }
}
