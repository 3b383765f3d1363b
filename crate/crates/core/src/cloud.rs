//! Weighted point clouds and their JSON interchange format.
//!
//! ```json
//! {"model": "poincare", "curvature": -1.0, "points": [[0.1, 0.2]], "weights": [1.0]}
//! ```
//! `weights` is optional and defaults to all ones.

use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{Geometry, ManifoldPoint, Model};

/// Points of one space with strictly positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPointCloud {
    geometry: Geometry,
    points: Vec<DVector<f64>>,
    weights: Vec<f64>,
}

/// Serialized form of a [`WeightedPointCloud`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloudFile {
    pub model: Model,
    pub curvature: f64,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl WeightedPointCloud {
    /// Validates every point and requires `t ≥ 1` points with positive finite weights.
    pub fn new(geometry: Geometry, points: Vec<DVector<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("a point cloud needs at least one point".into()));
        }
        if weights.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: weights.len() });
        }
        let len = points[0].len();
        for p in &points {
            if p.len() != len {
                return Err(Error::DimensionMismatch { expected: len, got: p.len() });
            }
            geometry.check(p)?;
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidInput(format!("weights must be positive and finite, got {w}")));
        }
        Ok(WeightedPointCloud { geometry, points, weights })
    }

    /// All weights equal to one.
    pub fn unit(geometry: Geometry, points: Vec<DVector<f64>>) -> Result<Self> {
        let w = vec![1.0; points.len()];
        Self::new(geometry, points, w)
    }

    /// Builds from validated points, which must share one space.
    pub fn from_points(points: &[ManifoldPoint], weights: Vec<f64>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidInput("a point cloud needs at least one point".into()))?;
        let g = *first.geometry();
        for p in points {
            g.same_space(p.geometry())?;
        }
        Self::new(g, points.iter().map(|p| p.coords().clone()).collect(), weights)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of points `t`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Length of each coordinate vector.
    pub fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }

    /// Intrinsic dimension `n`.
    pub fn dim(&self) -> usize {
        self.geometry.intrinsic_dim(self.ambient_dim())
    }

    /// `Σ w_l`.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Point `i` as a validated [`ManifoldPoint`].
    pub fn point(&self, i: usize) -> ManifoldPoint {
        ManifoldPoint::new(self.geometry, self.points[i].clone()).expect("cloud points are validated")
    }

    /// Same points with new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.geometry, self.points.clone(), weights)
    }

    /// Same weights with new points in the same space.
    pub fn with_points(&self, points: Vec<DVector<f64>>) -> Result<Self> {
        Self::new(self.geometry, points, self.weights.clone())
    }

    /// Converts every point to another model of the same curvature.
    pub fn convert(&self, model: Model) -> Result<Self> {
        let g = self.geometry.with_model(model)?;
        let pts = self
            .points
            .iter()
            .map(|p| Ok(g.project(&self.geometry.convert(p, model)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, pts, self.weights.clone())
    }

    /// Whether all points coincide exactly.
    pub fn all_identical(&self) -> bool {
        self.points.iter().all(|p| p == &self.points[0])
    }

    /// Serializable form.
    pub fn to_file(&self) -> CloudFile {
        CloudFile {
            model: self.geometry.model(),
            curvature: self.geometry.k(),
            points: self.points.iter().map(|p| p.iter().copied().collect()).collect(),
            weights: Some(self.weights.clone()),
        }
    }

    /// Validates a deserialized cloud.
    pub fn from_file(file: CloudFile) -> Result<Self> {
        let g = Geometry::new(file.model, file.curvature)?;
        let pts: Vec<DVector<f64>> = file.points.into_iter().map(DVector::from_vec).collect();
        let w = file.weights.unwrap_or_else(|| vec![1.0; pts.len()]);
        Self::new(g, pts, w)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
