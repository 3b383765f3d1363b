//! Hyperbolic geometry primitives for the Poincaré ball and hyperboloid
//! models, a Klein chart for conversions, and a flat Euclidean backend.
//!
//! [`Geometry`] carries the model and curvature and works on raw
//! [`DVector`] coordinates; this is the fast path used by the solvers.
//! [`ManifoldPoint`] and [`TangentVector`] wrap coordinates with their
//! geometry and validate the model invariants on construction and on every
//! operation that returns a point.

pub mod convert;
pub mod hyperboloid;
pub mod layers;
pub mod poincare;

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default margin kept between Poincaré points and the ball boundary.
pub const DEFAULT_BOUNDARY_EPS: f64 = 1e-5;

/// Tolerance on the hyperboloid constraint `k⟨x,x⟩_L = 1`, relative to `|k|·x₀²`.
pub const SHEET_TOL: f64 = 1e-10;

/// Tolerance on tangency `⟨x, v⟩_L = 0`, relative to `‖x‖·‖v‖`.
pub const TANGENT_TOL: f64 = 1e-10;

/// Representation of the space a point lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Poincare,
    Hyperboloid,
    Klein,
    Euclidean,
}

impl Model {
    /// Whether the model describes hyperbolic space.
    pub fn is_hyperbolic(self) -> bool {
        !matches!(self, Model::Euclidean)
    }

    /// Lower-case name used in JSON and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Model::Poincare => "poincare",
            Model::Hyperboloid => "hyperboloid",
            Model::Klein => "klein",
            Model::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poincare" => Ok(Model::Poincare),
            "hyperboloid" | "lorentz" => Ok(Model::Hyperboloid),
            "klein" => Ok(Model::Klein),
            "euclidean" => Ok(Model::Euclidean),
            other => Err(Error::InvalidInput(format!("unknown model `{other}`"))),
        }
    }
}

/// Sectional curvature `K ≤ 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Curvature(f64);

impl Curvature {
    /// Accepts any finite `k ≤ 0`.
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidCurvature { value: k, reason: "must be finite" });
        }
        if k > 0.0 {
            return Err(Error::InvalidCurvature { value: k, reason: "positive curvature is not supported" });
        }
        Ok(Curvature(k))
    }

    /// The raw value `K`.
    pub fn value(self) -> f64 {
        self.0
    }

    /// `√|K|`.
    pub fn sqrt_abs(self) -> f64 {
        self.0.abs().sqrt()
    }
}

impl TryFrom<f64> for Curvature {
    type Error = Error;
    fn try_from(k: f64) -> Result<Self> {
        Curvature::new(k)
    }
}

impl From<Curvature> for f64 {
    fn from(c: Curvature) -> f64 {
        c.0
    }
}

/// A model together with its curvature and boundary guard.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    model: Model,
    curvature: Curvature,
    boundary_eps: f64,
    allow_near_boundary: bool,
}

impl Geometry {
    /// Validates that hyperbolic models get `K < 0` and Euclidean gets `K = 0`.
    pub fn new(model: Model, k: f64) -> Result<Self> {
        let curvature = Curvature::new(k)?;
        if model.is_hyperbolic() && k == 0.0 {
            return Err(Error::InvalidCurvature { value: k, reason: "hyperbolic models need K < 0" });
        }
        if !model.is_hyperbolic() && k != 0.0 {
            return Err(Error::InvalidCurvature { value: k, reason: "the Euclidean backend needs K = 0" });
        }
        Ok(Geometry { model, curvature, boundary_eps: DEFAULT_BOUNDARY_EPS, allow_near_boundary: false })
    }

    pub fn poincare(k: f64) -> Result<Self> {
        Self::new(Model::Poincare, k)
    }

    pub fn hyperboloid(k: f64) -> Result<Self> {
        Self::new(Model::Hyperboloid, k)
    }

    pub fn klein(k: f64) -> Result<Self> {
        Self::new(Model::Klein, k)
    }

    pub fn euclidean() -> Self {
        Geometry {
            model: Model::Euclidean,
            curvature: Curvature(0.0),
            boundary_eps: DEFAULT_BOUNDARY_EPS,
            allow_near_boundary: false,
        }
    }

    /// Sets the Poincaré boundary margin.
    pub fn with_boundary_eps(mut self, eps: f64) -> Self {
        self.boundary_eps = eps;
        self
    }

    /// Unsafe mode: accept Poincaré points closer to the boundary than the margin.
    pub fn allow_near_boundary(mut self, allow: bool) -> Self {
        self.allow_near_boundary = allow;
        self
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    /// Shorthand for `self.curvature().value()`.
    pub fn k(&self) -> f64 {
        self.curvature.0
    }

    /// Same geometry with another model; curvature is kept for hyperbolic targets.
    pub fn with_model(&self, model: Model) -> Result<Self> {
        let mut g = Geometry::new(model, if model.is_hyperbolic() { self.k() } else { 0.0 })?;
        g.boundary_eps = self.boundary_eps;
        g.allow_near_boundary = self.allow_near_boundary;
        Ok(g)
    }

    /// Same model with another curvature.
    pub fn with_curvature(&self, k: f64) -> Result<Self> {
        let mut g = Geometry::new(self.model, k)?;
        g.boundary_eps = self.boundary_eps;
        g.allow_near_boundary = self.allow_near_boundary;
        Ok(g)
    }

    /// Whether two geometries describe the same space (model and curvature).
    pub fn same_space(&self, other: &Geometry) -> Result<()> {
        if self.model != other.model {
            return Err(Error::ModelMismatch { left: self.model, right: other.model });
        }
        if self.k() != other.k() {
            return Err(Error::CurvatureMismatch { left: self.k(), right: other.k() });
        }
        Ok(())
    }

    /// Length of coordinate vectors for intrinsic dimension `n`.
    pub fn ambient_dim(&self, n: usize) -> usize {
        match self.model {
            Model::Hyperboloid => n + 1,
            _ => n,
        }
    }

    /// Intrinsic dimension for coordinate vectors of length `len`.
    pub fn intrinsic_dim(&self, len: usize) -> usize {
        match self.model {
            Model::Hyperboloid => len.saturating_sub(1),
            _ => len,
        }
    }

    /// The origin in intrinsic dimension `n`.
    pub fn origin(&self, n: usize) -> DVector<f64> {
        let mut o = DVector::zeros(self.ambient_dim(n));
        if self.model == Model::Hyperboloid {
            o[0] = 1.0 / self.curvature.sqrt_abs();
        }
        o
    }

    fn off(&self, reason: String) -> Error {
        Error::OffManifold { model: self.model, reason }
    }

    /// Checks the model invariant for raw coordinates.
    pub fn check(&self, x: &DVector<f64>) -> Result<()> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(self.off("non-finite coordinate".into()));
        }
        let c = -self.k();
        match self.model {
            Model::Euclidean => Ok(()),
            Model::Poincare => {
                let margin = 1.0 - c * x.norm_squared();
                let floor = if self.allow_near_boundary { 0.0 } else { self.boundary_eps };
                if margin <= floor {
                    return Err(self.off(format!("1 − |K|‖x‖² = {margin:e} is within the boundary margin {floor:e}")));
                }
                Ok(())
            }
            Model::Klein => {
                let margin = 1.0 - c * x.norm_squared();
                if margin <= 0.0 {
                    return Err(self.off(format!("1 − |K|‖x‖² = {margin:e}")));
                }
                Ok(())
            }
            Model::Hyperboloid => {
                if x.len() < 2 {
                    return Err(Error::DimensionMismatch { expected: 2, got: x.len() });
                }
                if x[0] <= 0.0 {
                    return Err(self.off("point is on the lower sheet".into()));
                }
                let residual = (self.k() * hyperboloid::inner(x, x) - 1.0).abs();
                if residual > SHEET_TOL * (c * x[0] * x[0]).max(1.0) {
                    return Err(self.off(format!("K⟨x,x⟩_L − 1 = {residual:e}")));
                }
                Ok(())
            }
        }
    }

    /// Maps near-manifold coordinates back onto the model.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        match self.model {
            Model::Hyperboloid => hyperboloid::project_point(x, self.k()),
            _ => x.clone(),
        }
    }

    /// Projects an ambient vector onto the tangent space at `x` (identity off the hyperboloid).
    pub fn project_tangent(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        match self.model {
            Model::Hyperboloid => hyperboloid::project_tangent(x, v, self.k()),
            _ => v.clone(),
        }
    }

    fn unsupported(&self, op: &'static str) -> Error {
        Error::Unsupported { model: self.model, op }
    }

    fn same_len(x: &DVector<f64>, y: &DVector<f64>) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        Ok(())
    }

    /// Geodesic distance.
    pub fn distance(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        Self::same_len(x, y)?;
        match self.model {
            Model::Poincare => poincare::distance(x, y, self.k()),
            Model::Hyperboloid => hyperboloid::distance(x, y, self.k()),
            Model::Klein => convert::klein_distance(x, y, self.k()),
            Model::Euclidean => Ok((x - y).norm()),
        }
    }

    /// Riemannian inner product `ρ_x(u, v)`.
    pub fn metric_inner(&self, x: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        Self::same_len(x, u)?;
        Self::same_len(x, v)?;
        match self.model {
            Model::Poincare => Ok(poincare::lambda(x, self.k()).powi(2) * u.dot(v)),
            Model::Hyperboloid => Ok(hyperboloid::inner(u, v)),
            Model::Euclidean => Ok(u.dot(v)),
            Model::Klein => Err(self.unsupported("metric")),
        }
    }

    /// Riemannian norm `‖v‖_ρ` at `x`.
    pub fn norm(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        Ok(self.metric_inner(x, v, v)?.max(0.0).sqrt())
    }

    /// Exponential map.
    pub fn exp(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        Self::same_len(x, v)?;
        match self.model {
            Model::Poincare => poincare::exp(x, v, self.k()),
            Model::Hyperboloid => Ok(hyperboloid::exp(x, v, self.k())),
            Model::Euclidean => Ok(x + v),
            Model::Klein => Err(self.unsupported("exp map")),
        }
    }

    /// Logarithmic map.
    pub fn log(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        Self::same_len(x, y)?;
        match self.model {
            Model::Poincare => poincare::log(x, y, self.k()),
            Model::Hyperboloid => hyperboloid::log(x, y, self.k()),
            Model::Euclidean => Ok(y - x),
            Model::Klein => Err(self.unsupported("log map")),
        }
    }

    /// Parallel transport of `v` from `x` to `y` along the geodesic.
    pub fn transport(&self, x: &DVector<f64>, y: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        Self::same_len(x, y)?;
        Self::same_len(x, v)?;
        match self.model {
            Model::Poincare => Ok(poincare::transport(x, y, v, self.k())),
            Model::Hyperboloid => Ok(hyperboloid::transport(x, y, v, self.k())),
            Model::Euclidean => Ok(v.clone()),
            Model::Klein => Err(self.unsupported("parallel transport")),
        }
    }

    /// Converts raw coordinates to another model of the same curvature.
    pub fn convert(&self, x: &DVector<f64>, to: Model) -> Result<DVector<f64>> {
        convert::convert_coords(x, self.k(), self.model, to)
    }
}

/// A point validated against its model invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint {
    geometry: Geometry,
    coords: DVector<f64>,
}

impl ManifoldPoint {
    /// Validates `coords` against the model of `geometry`.
    pub fn new(geometry: Geometry, coords: impl Into<DVector<f64>>) -> Result<Self> {
        let coords = coords.into();
        geometry.check(&coords)?;
        Ok(ManifoldPoint { geometry, coords })
    }

    /// Builds from a slice.
    pub fn from_slice(geometry: Geometry, coords: &[f64]) -> Result<Self> {
        Self::new(geometry, DVector::from_column_slice(coords))
    }

    /// Re-projects onto the model before validating. Used for computed results.
    pub fn projected(geometry: Geometry, coords: DVector<f64>) -> Result<Self> {
        let coords = geometry.project(&coords);
        Self::new(geometry, coords)
    }

    /// The origin of intrinsic dimension `n`.
    pub fn origin(geometry: Geometry, n: usize) -> Self {
        ManifoldPoint { geometry, coords: geometry.origin(n) }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn model(&self) -> Model {
        self.geometry.model
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }

    /// Coordinates as a plain vector.
    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.iter().copied().collect()
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        self.geometry.intrinsic_dim(self.coords.len())
    }
}

/// A tangent vector together with its base point.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: ManifoldPoint,
    vec: DVector<f64>,
}

impl TangentVector {
    /// Validates length and, on the hyperboloid, tangency.
    pub fn new(base: ManifoldPoint, vec: impl Into<DVector<f64>>) -> Result<Self> {
        let vec = vec.into();
        if vec.len() != base.coords.len() {
            return Err(Error::DimensionMismatch { expected: base.coords.len(), got: vec.len() });
        }
        if vec.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite tangent component".into()));
        }
        if base.model() == Model::Hyperboloid {
            let residual = hyperboloid::inner(&base.coords, &vec).abs();
            if residual > TANGENT_TOL * (base.coords.norm() * vec.norm()).max(1.0) {
                return Err(Error::NotTangent { residual });
            }
        }
        Ok(TangentVector { base, vec })
    }

    /// Projects `vec` onto the tangent space before validating.
    pub fn projected(base: ManifoldPoint, vec: DVector<f64>) -> Result<Self> {
        let vec = base.geometry.project_tangent(&base.coords, &vec);
        Self::new(base, vec)
    }

    pub fn base(&self) -> &ManifoldPoint {
        &self.base
    }

    pub fn vec(&self) -> &DVector<f64> {
        &self.vec
    }

    /// Riemannian norm at the base point.
    pub fn norm(&self) -> Result<f64> {
        self.base.geometry.norm(&self.base.coords, &self.vec)
    }
}

fn same_space(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<()> {
    x.geometry.same_space(&y.geometry)
}

fn require_model(x: &ManifoldPoint, model: Model) -> Result<()> {
    if x.model() != model {
        return Err(Error::ModelMismatch { left: x.model(), right: model });
    }
    Ok(())
}

/// Lorentzian inner product `−x₀y₀ + Σ xᵢyᵢ` of two vectors of equal length ≥ 2.
pub fn lorentz_inner(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: x.len() });
    }
    Ok(-x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>())
}

/// Möbius addition `x ⊕ y` on the Poincaré ball.
pub fn mobius_add(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<ManifoldPoint> {
    require_model(x, Model::Poincare)?;
    same_space(x, y)?;
    let out = poincare::mobius_add(&x.coords, &y.coords, x.geometry.k())?;
    ManifoldPoint::new(x.geometry, out)
}

/// Gyration `gyr[x, y]v` on the Poincaré ball.
pub fn gyration(x: &ManifoldPoint, y: &ManifoldPoint, v: &[f64]) -> Result<DVector<f64>> {
    require_model(x, Model::Poincare)?;
    same_space(x, y)?;
    if v.len() != x.coords.len() {
        return Err(Error::DimensionMismatch { expected: x.coords.len(), got: v.len() });
    }
    Ok(poincare::gyration(&x.coords, &y.coords, &DVector::from_column_slice(v), x.geometry.k()))
}

/// Geodesic distance between two points of the same space.
pub fn distance(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
    same_space(x, y)?;
    x.geometry.distance(&x.coords, &y.coords)
}

/// Exponential map of a tangent vector.
pub fn exp_map(v: &TangentVector) -> Result<ManifoldPoint> {
    let g = v.base.geometry;
    ManifoldPoint::projected(g, g.exp(&v.base.coords, &v.vec)?)
}

/// Logarithmic map `log_x(y)`.
pub fn log_map(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<TangentVector> {
    same_space(x, y)?;
    let v = x.geometry.log(&x.coords, &y.coords)?;
    TangentVector::projected(x.clone(), v)
}

/// Parallel transport of `v` to `y`.
pub fn parallel_transport(v: &TangentVector, y: &ManifoldPoint) -> Result<TangentVector> {
    same_space(&v.base, y)?;
    let out = v.base.geometry.transport(&v.base.coords, &y.coords, &v.vec)?;
    TangentVector::projected(y.clone(), out)
}

/// Converts a point to another model of the same curvature.
pub fn convert(x: &ManifoldPoint, target: Model) -> Result<ManifoldPoint> {
    let g = x.geometry.with_model(target)?;
    let out = x.geometry.convert(&x.coords, target)?;
    ManifoldPoint::projected(g, out)
}
