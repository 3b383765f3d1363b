//! Seeded random clouds: isotropic Gaussian tangent vectors at the origin
//! pushed through the exponential map.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};
use crate::manifold::{Geometry, Model};

/// RNG for one trial; streams are independent per trial index, so running
/// trials in parallel or in any order gives identical clouds.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws `t` unit-weight points of intrinsic dimension `n`.
///
/// Each point is `exp₀(v)` where `v` has i.i.d. `N(0, scale²)` coordinates in
/// an orthonormal frame of the tangent space at the origin, so the geodesic
/// distance to the origin is `scale·χ_n`.
pub fn gen_points(geometry: Geometry, n: usize, t: usize, scale: f64, rng: &mut ChaCha8Rng) -> Result<WeightedPointCloud> {
    if n == 0 || t == 0 {
        return Err(Error::InvalidInput("dimension and point count must be positive".into()));
    }
    let normal = Normal::new(0.0, scale).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let sample_geom = match geometry.model() {
        Model::Klein => geometry.with_model(Model::Hyperboloid)?,
        _ => geometry,
    };
    let origin = sample_geom.origin(n);
    let points = (0..t)
        .map(|_| {
            let gauss = DVector::from_fn(n, |_, _| normal.sample(rng));
            let v = match sample_geom.model() {
                // orthonormal frame at 0 is e_i / λ₀ with λ₀ = 2
                Model::Poincare => gauss / 2.0,
                Model::Hyperboloid => gauss.insert_row(0, 0.0),
                _ => gauss,
            };
            let p = sample_geom.project(&sample_geom.exp(&origin, &v)?);
            if geometry.model() == Model::Klein {
                return sample_geom.convert(&p, Model::Klein);
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedPointCloud::unit(geometry, points)
}
