//! Independent test-only oracles and random-input helpers.
//!
//! Oracles here are transcribed directly from the defining formulas with
//! plain loops and do not call into the library's geometry code.

#![allow(dead_code)]

use hyperfrechet::manifold::{Geometry, Model};
use hyperfrechet::WeightedPointCloud;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CURVATURES: [f64; 3] = [-0.5, -1.0, -2.0];

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Möbius addition evaluated coordinate by coordinate.
pub fn mobius_oracle(x: &[f64], y: &[f64], k: f64) -> Vec<f64> {
    let xy = dot(x, y);
    let x2 = dot(x, x);
    let y2 = dot(y, y);
    let num_x = 1.0 - 2.0 * k * xy - k * y2;
    let num_y = 1.0 + k * x2;
    let den = 1.0 - 2.0 * k * xy + k * k * x2 * y2;
    (0..x.len()).map(|i| (num_x * x[i] + num_y * y[i]) / den).collect()
}

/// `gyr[a, b]v = ⊖(a ⊕ b) ⊕ (a ⊕ (b ⊕ v))` by composition.
pub fn gyration_oracle(a: &[f64], b: &[f64], v: &[f64], k: f64) -> Vec<f64> {
    let ab: Vec<f64> = mobius_oracle(a, b, k).iter().map(|c| -c).collect();
    let inner = mobius_oracle(a, &mobius_oracle(b, v, k), k);
    mobius_oracle(&ab, &inner, k)
}

/// Distance from the ball origin: `(2/√|K|)·artanh(√|K|·r)`.
pub fn ball_origin_distance(r: f64, k: f64) -> f64 {
    let s = (-k).sqrt();
    2.0 * (s * r).atanh() / s
}

/// Hyperboloid distance straight from `arccosh(K⟨x,y⟩_L)/√|K|`.
pub fn lorentz_distance_oracle(x: &[f64], y: &[f64], k: f64) -> f64 {
    let mut ip = -x[0] * y[0];
    for i in 1..x.len() {
        ip += x[i] * y[i];
    }
    (k * ip).max(1.0).acosh() / (-k).sqrt()
}

/// Seeded RNG for the oracle-driven tests.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction scaled to ball radius `r·(1/√|K|)`.
pub fn ball_point(rng: &mut ChaCha8Rng, n: usize, k: f64, max_frac: f64) -> DVector<f64> {
    let dir = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let frac = rng.random_range(0.0..max_frac);
    dir.normalize() * (frac / (-k).sqrt())
}

/// A hyperboloid point above a random ball point.
pub fn sheet_point(rng: &mut ChaCha8Rng, n: usize, k: f64, max_frac: f64) -> DVector<f64> {
    let p = ball_point(rng, n, k, max_frac);
    let c = -k;
    let m = 1.0 - c * p.norm_squared();
    let mut x = DVector::zeros(n + 1);
    x[0] = (1.0 + c * p.norm_squared()) / (m * c.sqrt());
    for i in 0..n {
        x[i + 1] = 2.0 * p[i] / m;
    }
    x
}

/// Random point of a model.
pub fn random_point(g: &Geometry, rng: &mut ChaCha8Rng, n: usize, max_frac: f64) -> DVector<f64> {
    match g.model() {
        Model::Hyperboloid => sheet_point(rng, n, g.k(), max_frac),
        Model::Euclidean => DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0)),
        _ => ball_point(rng, n, g.k(), max_frac),
    }
}

/// Random tangent vector at `x` with Riemannian norm exactly `norm`.
pub fn tangent_with_norm(g: &Geometry, x: &DVector<f64>, rng: &mut ChaCha8Rng, norm: f64) -> DVector<f64> {
    let raw = DVector::from_fn(x.len(), |_, _| rng.random_range(-1.0..1.0));
    let v = g.project_tangent(x, &raw);
    let current = g.norm(x, &v).unwrap();
    if current == 0.0 {
        return v;
    }
    v * (norm / current)
}

/// Random cloud with weights in `[0.5, 1.5)`.
pub fn random_cloud(g: Geometry, n: usize, t: usize, seed: u64, max_frac: f64) -> WeightedPointCloud {
    let mut r = rng(seed);
    let pts = (0..t).map(|_| random_point(&g, &mut r, n, max_frac)).collect();
    let w = (0..t).map(|_| r.random_range(0.5..1.5)).collect();
    WeightedPointCloud::new(g, pts, w).unwrap()
}

/// Random orthogonal matrix via QR.
pub fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

/// Applies a rotation of the spatial block (`diag(1, R)` on the hyperboloid).
pub fn rotate(model: Model, r: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    match model {
        Model::Hyperboloid => {
            let n = x.len() - 1;
            let s = r * x.rows(1, n);
            let mut out = x.clone();
            out.rows_mut(1, n).copy_from(&s);
            out
        }
        _ => r * x,
    }
}

/// Proptest strategy for a ball point of dimension `n` as a fraction of the radius.
pub fn ball_strategy(n: usize, max_frac: f64) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-1.0f64..1.0, n), 0.0f64..max_frac).prop_map(move |(v, frac)| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return vec![0.0; n];
        }
        v.iter().map(|x| x / norm * frac).collect()
    })
}

/// Max absolute entry difference.
pub fn max_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax()
}
