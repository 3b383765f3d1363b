//! Hyperbolic counterparts of the affine and activation layers of a network.
//!
//! Each one moves to the tangent space at the origin (or at `x`), applies the
//! Euclidean operation there, and maps back. On the hyperboloid the tangent
//! space at the origin has a zero time component, so matrices and activations
//! act on the spatial block only.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{exp_map, log_map, parallel_transport, ManifoldPoint, Model, TangentVector};

fn spatial_range(model: Model, len: usize) -> (usize, usize) {
    match model {
        Model::Hyperboloid => (1, len - 1),
        _ => (0, len),
    }
}

/// `A ⊗ x = exp₀(A·log₀(x))`. `A` maps intrinsic dimension `n` to `m`.
pub fn hyp_matvec(a: &DMatrix<f64>, x: &ManifoldPoint) -> Result<ManifoldPoint> {
    let g = *x.geometry();
    let n = x.dim();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    let o_in = ManifoldPoint::origin(g, n);
    let o_out = ManifoldPoint::origin(g, a.nrows());
    let v = log_map(&o_in, x)?;
    let (start, len) = spatial_range(g.model(), v.vec().len());
    let mapped = a * v.vec().rows(start, len);
    let mut out = DVector::zeros(g.ambient_dim(a.nrows()));
    out.rows_mut(start, a.nrows()).copy_from(&mapped);
    exp_map(&TangentVector::new(o_out, out)?)
}

/// `x ⊕ b = exp_x(PT_{0→x}(log₀ b))`; reduces to Möbius addition on the ball.
pub fn hyp_bias_add(x: &ManifoldPoint, b: &ManifoldPoint) -> Result<ManifoldPoint> {
    let o = ManifoldPoint::origin(*x.geometry(), x.dim());
    let v = log_map(&o, b)?;
    exp_map(&parallel_transport(&v, x)?)
}

/// `σ^{K₁,K₂}(x) = exp₀^{K₁}(σ(log₀^{K₂}(x)))` for `x` of curvature `K₂`.
pub fn hyp_activation(x: &ManifoldPoint, sigma: impl Fn(f64) -> f64, k_out: f64) -> Result<ManifoldPoint> {
    let g_in = *x.geometry();
    let g_out = g_in.with_curvature(k_out)?;
    let n = x.dim();
    let v = log_map(&ManifoldPoint::origin(g_in, n), x)?;
    let (start, len) = spatial_range(g_in.model(), v.vec().len());
    let mut w = v.vec().clone();
    for i in start..start + len {
        w[i] = sigma(w[i]);
    }
    exp_map(&TangentVector::new(ManifoldPoint::origin(g_out, n), w)?)
}
