//! Scalar special functions behind the distance and the solver weights.
//!
//! With `φ(v) = arccosh(v)²` the Fréchet weight factor is `φ'(1 + z) =
//! 2·arccosh(1 + z)/√(z(2 + z))`. Both it and `φ''` have a removable
//! singularity at `z = 0`, so small arguments go through the Taylor series.

use crate::error::{Error, Result};

/// Arguments of arccosh in `[1 - ACOSH_CLAMP, 1)` are treated as exactly 1.
pub const ACOSH_CLAMP: f64 = 1e-12;

const SERIES_TERMS: usize = 24;
const WEIGHT_SERIES_BELOW: f64 = 1e-8;
const CURVATURE_SERIES_BELOW: f64 = 0.1;

/// `arccosh(1 + z)` evaluated without cancellation for small `z`.
pub fn acosh1p(z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::ArccoshDomain(f64::NAN));
    }
    if z < 0.0 {
        if z >= -ACOSH_CLAMP {
            return Ok(0.0);
        }
        return Err(Error::ArccoshDomain(1.0 + z));
    }
    Ok((z + (z * (2.0 + z)).sqrt()).ln_1p())
}

/// Taylor coefficients of `arccosh(1 + z)/√(z(2 + z))` around zero.
fn series_coefficients() -> [f64; SERIES_TERMS] {
    let mut c = [0.0; SERIES_TERMS];
    c[0] = 1.0;
    for n in 1..SERIES_TERMS {
        let nf = n as f64;
        c[n] = c[n - 1] * (-nf / (2.0 * nf + 1.0));
    }
    c
}

/// `φ'(1 + z) = 2·arccosh(1 + z)/√(z(2 + z))`, equal to 2 at `z = 0`.
///
/// Negative rounding noise in `z` is clamped to zero.
pub fn weight_factor(z: f64) -> f64 {
    let z = z.max(0.0);
    if z < WEIGHT_SERIES_BELOW {
        weight_factor_series(z)
    } else {
        weight_factor_closed(z)
    }
}

fn weight_factor_series(z: f64) -> f64 {
    let c = series_coefficients();
    2.0 * (c[0] + z * (c[1] + z * c[2]))
}

fn weight_factor_closed(z: f64) -> f64 {
    let a = (z + (z * (2.0 + z)).sqrt()).ln_1p();
    2.0 * a / (z * (2.0 + z)).sqrt()
}

/// `φ''(1 + z)`, the derivative of [`weight_factor`], equal to −2/3 at `z = 0`.
pub fn weight_factor_derivative(z: f64) -> f64 {
    let z = z.max(0.0);
    if z < CURVATURE_SERIES_BELOW {
        derivative_series(z)
    } else {
        derivative_closed(z)
    }
}

fn derivative_series(z: f64) -> f64 {
    let c = series_coefficients();
    let mut acc = 0.0;
    for n in (1..SERIES_TERMS).rev() {
        acc = acc * z + n as f64 * c[n];
    }
    2.0 * acc
}

fn derivative_closed(z: f64) -> f64 {
    let v = 1.0 + z;
    let q = z * (2.0 + z);
    let a = (z + q.sqrt()).ln_1p();
    2.0 / q - 2.0 * v * a / (q * q.sqrt())
}
