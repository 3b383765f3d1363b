//! Diffeomorphisms between the Poincaré, hyperboloid and Klein charts.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::acosh1p;

use super::Model;

fn blow_up(what: &str, margin: f64) -> Error {
    Error::Boundary(format!("{what}: 1 − |K|‖x‖² = {margin:e}"))
}

/// Poincaré ball to hyperboloid.
pub fn poincare_to_hyperboloid(p: &DVector<f64>, k: f64) -> Result<DVector<f64>> {
    let c = -k;
    let margin = 1.0 - c * p.norm_squared();
    if margin <= 0.0 {
        return Err(blow_up("Poincaré to hyperboloid", margin));
    }
    let mut out = DVector::zeros(p.len() + 1);
    out[0] = (2.0 - margin) / (margin * c.sqrt());
    out.rows_mut(1, p.len()).copy_from(&(p * (2.0 / margin)));
    Ok(out)
}

/// Hyperboloid to Poincaré ball.
pub fn hyperboloid_to_poincare(x: &DVector<f64>, k: f64) -> DVector<f64> {
    let n = x.len() - 1;
    x.rows(1, n) / (1.0 + (-k).sqrt() * x[0])
}

/// Poincaré ball to Klein disk.
pub fn poincare_to_klein(p: &DVector<f64>, k: f64) -> DVector<f64> {
    p * (2.0 / (1.0 - k * p.norm_squared()))
}

/// Klein disk to Poincaré ball.
pub fn klein_to_poincare(q: &DVector<f64>, k: f64) -> Result<DVector<f64>> {
    let margin = 1.0 + k * q.norm_squared();
    if margin <= 0.0 {
        return Err(blow_up("Klein to Poincaré", margin));
    }
    Ok(q / (1.0 + margin.sqrt()))
}

/// Hyperboloid to Klein disk.
pub fn hyperboloid_to_klein(x: &DVector<f64>, k: f64) -> DVector<f64> {
    let n = x.len() - 1;
    x.rows(1, n) / ((-k).sqrt() * x[0])
}

/// Klein disk to hyperboloid.
pub fn klein_to_hyperboloid(q: &DVector<f64>, k: f64) -> Result<DVector<f64>> {
    let margin = 1.0 + k * q.norm_squared();
    if margin <= 0.0 {
        return Err(blow_up("Klein to hyperboloid", margin));
    }
    let root = margin.sqrt();
    let mut out = DVector::zeros(q.len() + 1);
    out[0] = 1.0 / ((-k).sqrt() * root);
    out.rows_mut(1, q.len()).copy_from(&(q / root));
    Ok(out)
}

/// Klein-model geodesic distance.
pub fn klein_distance(x: &DVector<f64>, y: &DVector<f64>, k: f64) -> Result<f64> {
    let c = -k;
    let ax = 1.0 - c * x.norm_squared();
    let ay = 1.0 - c * y.norm_squared();
    // cosh(√c·d) − 1 = (1 − c⟨x,y⟩ − √(ax·ay))/√(ax·ay); rewritten to avoid cancellation.
    let root = (ax * ay).sqrt();
    let num = c * (x - y).norm_squared()
        - c * c * (x.norm_squared() * y.norm_squared() - x.dot(y).powi(2));
    let excess = num / (root * (1.0 - c * x.dot(y) + root));
    Ok(acosh1p(excess)? / c.sqrt())
}

/// Converts raw coordinates between hyperbolic charts. Euclidean is only
/// convertible to itself.
pub fn convert_coords(x: &DVector<f64>, k: f64, from: Model, to: Model) -> Result<DVector<f64>> {
    use Model::*;
    Ok(match (from, to) {
        (a, b) if a == b => x.clone(),
        (Poincare, Hyperboloid) => poincare_to_hyperboloid(x, k)?,
        (Poincare, Klein) => poincare_to_klein(x, k),
        (Hyperboloid, Poincare) => hyperboloid_to_poincare(x, k),
        (Hyperboloid, Klein) => hyperboloid_to_klein(x, k),
        (Klein, Poincare) => klein_to_poincare(x, k)?,
        (Klein, Hyperboloid) => klein_to_hyperboloid(x, k)?,
        (a, b) => return Err(Error::ModelMismatch { left: a, right: b }),
    })
}
