//! Variance gap of pseudo-means over many random clouds.

use rayon::prelude::*;
use serde::Serialize;

use super::{gen_points, mean_std, trial_rng, BenchConfig};
use crate::error::Result;
use crate::manifold::Model;
use crate::pseudo::{variance_gap_report, GapRow, TangentBase};

/// Aggregate over trials for one method.
#[derive(Clone, Debug, Serialize)]
pub struct PseudoRow {
    pub method: String,
    pub mean_excess: f64,
    pub std_excess: f64,
    pub mean_distance: f64,
    pub std_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudoReport {
    pub config: BenchConfig,
    pub rows: Vec<PseudoRow>,
    /// Per-trial rows in trial order.
    pub trials: Vec<Vec<GapRow>>,
}

/// Clouds are drawn in the Klein model (or Euclidean space) and converted to
/// the configured model before the means are compared.
pub fn pseudo_compare(config: &BenchConfig, base: TangentBase) -> Result<PseudoReport> {
    config.validate()?;
    let target = config.geometry()?;
    let sample_geom = if target.model().is_hyperbolic() { target.with_model(Model::Klein)? } else { target };
    let trials: Vec<Vec<GapRow>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let cloud = gen_points(sample_geom, config.dim, config.points, config.scale, &mut trial_rng(config.seed, t as u64))?;
            let cloud = if target.model() == sample_geom.model() { cloud } else { cloud.convert(target.model())? };
            variance_gap_report(&cloud, base)
        })
        .collect::<Result<_>>()?;
    let rows = trials[0]
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let ex: Vec<f64> = trials.iter().map(|t| t[j].excess).collect();
            let di: Vec<f64> = trials.iter().map(|t| t[j].distance).collect();
            let (mean_excess, std_excess) = mean_std(&ex);
            let (mean_distance, std_distance) = mean_std(&di);
            PseudoRow { method: r.method.clone(), mean_excess, std_excess, mean_distance, std_distance }
        })
        .collect();
    Ok(PseudoReport { config: config.clone(), rows, trials })
}
