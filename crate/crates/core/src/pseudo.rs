//! Pseudo-means that approximate the Fréchet mean in closed form, and a
//! report of how much Fréchet variance they give up.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};
use crate::manifold::{ManifoldPoint, Model};
use crate::solvers::{frechet_objective, solve_frechet, SolveConfig};

/// `exp_base(Σ w_l log_base x⁽ˡ⁾ / Σ w_l)`.
pub fn tangent_aggregation(cloud: &WeightedPointCloud, base: &ManifoldPoint) -> Result<ManifoldPoint> {
    let g = *cloud.geometry();
    g.same_space(base.geometry())?;
    let b = base.coords();
    let mut acc = DVector::zeros(b.len());
    for (x, w) in cloud.points().iter().zip(cloud.weights()) {
        acc.axpy(*w, &g.log(b, x)?, 1.0);
    }
    let v = g.project_tangent(b, &(acc / cloud.total_weight()));
    ManifoldPoint::projected(g, g.exp(b, &v)?)
}

/// Weighted Einstein midpoint `Σ w γ x / Σ w γ` in Klein coordinates with
/// `γ = 1/√(1 − |K|‖x‖²)`, returned in the cloud's model. Euclidean clouds
/// get the weighted arithmetic mean.
pub fn einstein_midpoint(cloud: &WeightedPointCloud) -> Result<ManifoldPoint> {
    let model = cloud.geometry().model();
    let klein = if model.is_hyperbolic() { cloud.convert(Model::Klein)? } else { cloud.clone() };
    let c = -klein.geometry().k();
    let mut num = DVector::zeros(klein.ambient_dim());
    let mut den = 0.0;
    for (x, w) in klein.points().iter().zip(klein.weights()) {
        let margin = 1.0 - c * x.norm_squared();
        if margin <= 0.0 {
            return Err(Error::Boundary(format!("Lorentz factor undefined, 1 − |K|‖x‖² = {margin:e}")));
        }
        let gamma = 1.0 / margin.sqrt();
        num.axpy(w * gamma, x, 1.0);
        den += w * gamma;
    }
    let m = ManifoldPoint::new(*klein.geometry(), num / den)?;
    if model.is_hyperbolic() {
        crate::manifold::convert(&m, model)
    } else {
        Ok(m)
    }
}

/// Base point used by [`variance_gap_report`] for tangent aggregation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentBase {
    /// The origin, as in standard hyperbolic graph-network aggregation.
    #[default]
    Origin,
    FirstPoint,
}

/// One method's gap to the true mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub method: String,
    /// `(σ²_method − σ²_fr)/σ²_fr`.
    pub excess: f64,
    /// Ambient Euclidean distance to the true mean.
    pub distance: f64,
}

/// Variance excess of each pseudo-mean over the solved Fréchet mean.
pub fn variance_gap_report(cloud: &WeightedPointCloud, base: TangentBase) -> Result<Vec<GapRow>> {
    let config = SolveConfig { max_iters: 5000, step_tol: 1e-14, ..Default::default() };
    let truth = solve_frechet(cloud, &config)?.mean;
    let best = frechet_objective(cloud, &truth)?;
    let base_point = match base {
        TangentBase::Origin => ManifoldPoint::origin(*cloud.geometry(), cloud.dim()),
        TangentBase::FirstPoint => cloud.point(0),
    };
    let candidates = [
        ("ours", truth.clone()),
        ("tangent_aggregation", tangent_aggregation(cloud, &base_point)?),
        ("einstein_midpoint", einstein_midpoint(cloud)?),
    ];
    candidates
        .into_iter()
        .map(|(name, m)| {
            let f = frechet_objective(cloud, &m)?;
            let excess = if best > 0.0 { (f - best) / best } else { 0.0 };
            Ok(GapRow { method: name.into(), excess, distance: (m.coords() - truth.coords()).norm() })
        })
        .collect()
}
