//! Second derivatives of the Poincaré-ball objective
//! `f(y) = (1/|K|)·Σ w_l φ(v_l)`, `φ = arccosh²`,
//! `v_l = 1 − 2K‖x_l − y‖²/((1 + K‖x_l‖²)(1 + K‖y‖²))`.
//!
//! `T` is `∂v/∂y` and `M` is `∂v/∂x`; the Hessian, the mixed blocks and the
//! weight and curvature sensitivities are assembled from them and from
//! `φ'`, `φ''` evaluated through their series near `v = 1`.

use nalgebra::{DMatrix, DVector};

use super::Assembled;
use crate::cloud::WeightedPointCloud;
use crate::scalar::{weight_factor, weight_factor_derivative};

pub(crate) fn assemble(cloud: &WeightedPointCloud, y: &DVector<f64>) -> Assembled {
    let k = cloud.geometry().k();
    let inv_c = 1.0 / k.abs();
    let n = y.len();
    let b = y.norm_squared();
    let kb = 1.0 + k * b;
    let mut hessian = DMatrix::zeros(n, n);
    let mut mixed = Vec::with_capacity(cloud.len());
    let mut weight_rhs = Vec::with_capacity(cloud.len());
    // ∂_K ∇f = (1/K²)·Σ wφ'T − (1/K)·Σ w(φ''·∂_K v·T + φ'·∂_K T)
    let mut curvature_rhs = DVector::zeros(n);

    for (x, &w) in cloud.points().iter().zip(cloud.weights()) {
        let a = x.norm_squared();
        let ka = 1.0 + k * a;
        let d = ka * kb;
        let diff = x - y;
        let s = diff.norm_squared();
        let z = -2.0 * k * s / d;
        let dphi = weight_factor(z);
        let ddphi = weight_factor_derivative(z);

        let t = &diff * (4.0 * k / d) + y * (4.0 * k * k * s * ka / (d * d));
        let m = &diff * (-4.0 * k / d) + x * (4.0 * k * k * s * kb / (d * d));

        // ∂T_j/∂y_i
        let mut dt_dy = DMatrix::from_diagonal_element(n, n, -4.0 * k / d + 4.0 * k * k * ka * s / (d * d));
        let sym = y * diff.transpose();
        dt_dy -= (&sym + sym.transpose()) * (8.0 * k * k * ka / (d * d));
        dt_dy -= y * y.transpose() * (16.0 * k.powi(3) * ka * ka * s / d.powi(3));
        hessian += (&t * t.transpose() * ddphi + dt_dy * dphi) * (w * inv_c);

        // ∂T_j/∂x_k, rows j, columns k
        let mut dt_dx = DMatrix::from_diagonal_element(n, n, 4.0 * k / d);
        dt_dx -= &diff * x.transpose() * (8.0 * k * k * kb / (d * d));
        dt_dx += y * diff.transpose() * (8.0 * k * k * ka / (d * d));
        dt_dx -= y * x.transpose() * (8.0 * k.powi(3) * s / (d * d));
        mixed.push((&t * m.transpose() * ddphi + dt_dx * dphi) * (w * inv_c));

        weight_rhs.push(&t * (dphi * inv_c));

        let q = 1.0 - k * k * a * b;
        let dv_dk = -2.0 * s * q / (d * d);
        let dt_dk = &diff * (4.0 * q / (d * d))
            + y * (4.0 * s * k * (2.0 + k * a - k * k * a * b) / (ka * ka * kb.powi(3)));
        curvature_rhs += &t * (w * dphi / (k * k));
        curvature_rhs -= (&t * (ddphi * dv_dk) + dt_dk * dphi) * (w / k);
    }
    Assembled { hessian, mixed, weight_rhs, curvature_rhs, constraint: None }
}
