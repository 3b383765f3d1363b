//! Hyperboloid (Lorentz) formulas on raw ambient vectors (curvature `k < 0`).

use nalgebra::DVector;

use crate::error::Result;
use crate::scalar::acosh1p;

/// Lorentzian inner product `−x₀y₀ + Σ xᵢyᵢ`. Lengths must already agree.
pub fn inner(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    x.dot(y) - 2.0 * x[0] * y[0]
}

/// `M·x` with `M = diag(−1, 1, …, 1)`.
pub fn metric_apply(x: &DVector<f64>) -> DVector<f64> {
    let mut out = x.clone();
    out[0] = -out[0];
    out
}

/// `k⟨x, y⟩_L − 1`, computed from the difference `x − y` when the points are close.
pub fn cosh_excess(x: &DVector<f64>, y: &DVector<f64>, k: f64) -> f64 {
    let direct = k * inner(x, y) - 1.0;
    if direct < 1.0 {
        let d = x - y;
        -k * inner(&d, &d) / 2.0
    } else {
        direct
    }
}

/// Geodesic distance.
pub fn distance(x: &DVector<f64>, y: &DVector<f64>, k: f64) -> Result<f64> {
    Ok(acosh1p(cosh_excess(x, y, k))? / (-k).sqrt())
}

/// Lifts spatial coordinates onto the upper sheet.
pub fn lift(spatial: &[f64], k: f64) -> DVector<f64> {
    let s2: f64 = spatial.iter().map(|s| s * s).sum();
    let mut out = DVector::zeros(spatial.len() + 1);
    out[0] = (s2 - 1.0 / k).sqrt();
    out.rows_mut(1, spatial.len()).copy_from_slice(spatial);
    out
}

/// Re-projects a near-manifold point onto the sheet by recomputing `x₀`.
pub fn project_point(x: &DVector<f64>, k: f64) -> DVector<f64> {
    lift(&x.as_slice()[1..], k)
}

/// Projects an ambient vector onto the tangent space at `x`.
pub fn project_tangent(x: &DVector<f64>, v: &DVector<f64>, k: f64) -> DVector<f64> {
    v - x * (k * inner(x, v))
}

/// Exponential map at `x`.
pub fn exp(x: &DVector<f64>, v: &DVector<f64>, k: f64) -> DVector<f64> {
    let n2 = inner(v, v).max(0.0);
    if n2 == 0.0 {
        return x.clone();
    }
    let r = (-k).sqrt() * n2.sqrt();
    project_point(&(x * r.cosh() + v * (r.sinh() / r)), k)
}

/// Logarithmic map at `x`.
pub fn log(x: &DVector<f64>, y: &DVector<f64>, k: f64) -> Result<DVector<f64>> {
    let z = cosh_excess(x, y, k);
    let d = acosh1p(z)?;
    if d == 0.0 {
        return Ok(DVector::zeros(x.len()));
    }
    // y − (1 + z)x, grouped to avoid cancellation for nearby points.
    let dir = (y - x) - x * z;
    Ok(project_tangent(x, &(dir * (d / d.sinh())), k))
}

/// Parallel transport of `v` from `x` to `y`.
pub fn transport(x: &DVector<f64>, y: &DVector<f64>, v: &DVector<f64>, k: f64) -> DVector<f64> {
    let coef = k * inner(y, v) / (1.0 + k * inner(x, y));
    project_tangent(y, &(v - (x + y) * coef), k)
}
