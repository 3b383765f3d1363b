//! Poincaré ball formulas on raw coordinate vectors (curvature `k < 0`).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::acosh1p;

/// Denominators below this magnitude are reported as degenerate.
const DEGENERATE: f64 = 1e-300;

/// Conformal factor `λ_x = 2/(1 + k‖x‖²)`.
pub fn lambda(x: &DVector<f64>, k: f64) -> f64 {
    2.0 / (1.0 + k * x.norm_squared())
}

/// Möbius addition `x ⊕ y`.
pub fn mobius_add(x: &DVector<f64>, y: &DVector<f64>, k: f64) -> Result<DVector<f64>> {
    let xy = x.dot(y);
    let x2 = x.norm_squared();
    let y2 = y.norm_squared();
    let den = 1.0 - 2.0 * k * xy + k * k * x2 * y2;
    if den.abs() < DEGENERATE || !den.is_finite() {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok((x * (1.0 - 2.0 * k * xy - k * y2) + y * (1.0 + k * x2)) / den)
}

/// Closed form of `gyr[a, b]v = ⊖(a ⊕ b) ⊕ (a ⊕ (b ⊕ v))`.
pub fn gyration(a: &DVector<f64>, b: &DVector<f64>, v: &DVector<f64>, k: f64) -> DVector<f64> {
    let ab = a.dot(b);
    let av = a.dot(v);
    let bv = b.dot(v);
    let a2 = a.norm_squared();
    let b2 = b.norm_squared();
    let k2 = k * k;
    let p = -k2 * av * b2 - k * bv + 2.0 * k2 * ab * bv;
    let q = -k2 * bv * a2 + k * av;
    let d = 1.0 - 2.0 * k * ab + k2 * a2 * b2;
    v + (a * p + b * q) * (2.0 / d)
}

/// `arccosh` argument minus one: `-2k‖x−y‖²/((1+k‖x‖²)(1+k‖y‖²))`.
pub fn cosh_excess(x: &DVector<f64>, y: &DVector<f64>, k: f64) -> f64 {
    let den = (1.0 + k * x.norm_squared()) * (1.0 + k * y.norm_squared());
    -2.0 * k * (x - y).norm_squared() / den
}

/// Geodesic distance.
pub fn distance(x: &DVector<f64>, y: &DVector<f64>, k: f64) -> Result<f64> {
    Ok(acosh1p(cosh_excess(x, y, k))? / (-k).sqrt())
}

/// Exponential map at `x`.
pub fn exp(x: &DVector<f64>, v: &DVector<f64>, k: f64) -> Result<DVector<f64>> {
    let nv = v.norm();
    if nv == 0.0 {
        return Ok(x.clone());
    }
    let sk = (-k).sqrt();
    let step = v * ((sk * lambda(x, k) * nv / 2.0).tanh() / (sk * nv));
    mobius_add(x, &step, k)
}

/// Logarithmic map at `x`.
pub fn log(x: &DVector<f64>, y: &DVector<f64>, k: f64) -> Result<DVector<f64>> {
    let u = mobius_add(&(-x), y, k)?;
    let nu = u.norm();
    if nu == 0.0 {
        return Ok(DVector::zeros(x.len()));
    }
    let sk = (-k).sqrt();
    let r = sk * nu;
    if r >= 1.0 {
        return Err(Error::Boundary(format!("|K|^(1/2)·‖−x⊕y‖ = {r} reaches the ball edge")));
    }
    Ok(u * (2.0 / (sk * lambda(x, k)) * r.atanh() / nu))
}

/// Parallel transport of `v` from `x` to `y`.
pub fn transport(x: &DVector<f64>, y: &DVector<f64>, v: &DVector<f64>, k: f64) -> DVector<f64> {
    gyration(y, &(-x), v, k) * (lambda(x, k) / lambda(y, k))
}
