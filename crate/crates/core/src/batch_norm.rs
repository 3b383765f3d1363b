//! Riemannian batch normalization.
//!
//! Training step on a batch `x_1..x_m`:
//! `μ = FrechetMean(x)`, `σ² = (1/m)Σ d(x_i, μ)²`, then
//! `x̃_i = exp_{μ'}((σ'/√(σ² + ε))·PT_{μ→μ'}(log_μ x_i))`.
//! Running statistics follow `μ_test ← FrechetMean({μ_test, μ}, {η, 1 − η})`
//! and `σ_test ← ((t − 1)σ_test + √(σ² + ε))/t`, with `μ_test` initialized to
//! the first batch mean and `σ_test` to zero.
//!
//! Inference recomputes the statistics `μ̄, σ̄` of the incoming batch and maps
//! it onto the running statistics. This differs from Euclidean batch norm,
//! which uses only the running statistics at test time.
//!
//! On the Euclidean backend the variance is summed over coordinates.
//! [`ProductBatchNorm`] treats `ℝⁿ` as the product `ℝ × … × ℝ` instead,
//! which reproduces per-feature textbook batch normalization.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};
use crate::manifold::{Geometry, ManifoldPoint, Model};
use crate::solvers::{solve_frechet, SolveConfig};

/// Default variance regularizer.
pub const DEFAULT_EPSILON: f64 = 1e-5;

/// Learned targets and running statistics.
#[derive(Clone, Debug)]
pub struct BatchNormState {
    geometry: Geometry,
    /// `μ'`.
    pub target_mean: DVector<f64>,
    /// `σ'²`.
    pub target_variance: f64,
    /// `μ_test`; `None` until the first training step.
    pub running_mean: Option<DVector<f64>>,
    /// `σ_test`, an average of batch standard deviations.
    pub running_variance: f64,
    /// `η ∈ [0, 1]`.
    pub momentum: f64,
    /// `t`, the number of training steps taken.
    pub step_count: u64,
    /// `ε`.
    pub epsilon: f64,
    /// Solver settings for the batch means.
    pub solve_config: SolveConfig,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    model: Model,
    curvature: f64,
    target_mean: Vec<f64>,
    target_variance: f64,
    running_mean: Option<Vec<f64>>,
    running_variance: f64,
    momentum: f64,
    step_count: u64,
    epsilon: f64,
}

/// Batch mean and coordinate-free biased variance `(1/m)Σ d(x_i, μ)²`.
pub fn batch_statistics(batch: &WeightedPointCloud, config: &SolveConfig) -> Result<(DVector<f64>, f64)> {
    let mean = solve_frechet(batch, config)?.mean.into_coords();
    let g = batch.geometry();
    let mut var = 0.0;
    for x in batch.points() {
        var += g.distance(x, &mean)?.powi(2);
    }
    Ok((mean, var / batch.len() as f64))
}

fn require_unit_weights(batch: &WeightedPointCloud) -> Result<()> {
    if batch.weights().iter().any(|w| *w != 1.0) {
        return Err(Error::InvalidInput("batch normalization expects unit weights".into()));
    }
    Ok(())
}

impl BatchNormState {
    /// New state with `ε = 1e-5` and no running statistics yet.
    pub fn new(target_mean: &ManifoldPoint, target_variance: f64, momentum: f64) -> Result<Self> {
        let mut s = BatchNormState {
            geometry: *target_mean.geometry(),
            target_mean: target_mean.coords().clone(),
            target_variance: 1.0,
            running_mean: None,
            running_variance: 0.0,
            momentum,
            step_count: 0,
            epsilon: DEFAULT_EPSILON,
            solve_config: SolveConfig { max_iters: 2000, step_tol: 1e-13, ..Default::default() },
        };
        s.set_targets(target_mean, target_variance)?;
        if !(0.0..=1.0).contains(&momentum) {
            return Err(Error::InvalidInput(format!("momentum must lie in [0, 1], got {momentum}")));
        }
        Ok(s)
    }

    /// Overrides `ε`.
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidInput("epsilon must be positive".into()));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    /// Update hook for the learned parameters `μ'` and `σ'²`.
    pub fn set_targets(&mut self, target_mean: &ManifoldPoint, target_variance: f64) -> Result<()> {
        self.geometry.same_space(target_mean.geometry())?;
        if !(target_variance > 0.0 && target_variance.is_finite()) {
            return Err(Error::InvalidInput(format!("target variance must be positive, got {target_variance}")));
        }
        self.target_mean = target_mean.coords().clone();
        self.target_variance = target_variance;
        Ok(())
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    fn check_batch(&self, batch: &WeightedPointCloud) -> Result<()> {
        self.geometry.same_space(batch.geometry())?;
        if batch.ambient_dim() != self.target_mean.len() {
            return Err(Error::DimensionMismatch { expected: self.target_mean.len(), got: batch.ambient_dim() });
        }
        require_unit_weights(batch)
    }

    fn normalize(
        &self,
        batch: &WeightedPointCloud,
        from: &DVector<f64>,
        sigma: f64,
        to: &DVector<f64>,
        target_sigma: f64,
    ) -> Result<WeightedPointCloud> {
        let g = &self.geometry;
        let scale = target_sigma / sigma;
        let out = batch
            .points()
            .iter()
            .map(|x| {
                let v = g.transport(from, to, &g.log(from, x)?)? * scale;
                let v = g.project_tangent(to, &v);
                Ok(g.project(&g.exp(to, &v)?))
            })
            .collect::<Result<Vec<_>>>()?;
        WeightedPointCloud::unit(*g, out)
    }

    fn blend_running_mean(&self, old: &DVector<f64>, batch_mean: &DVector<f64>) -> Result<DVector<f64>> {
        let eta = self.momentum;
        if eta == 1.0 {
            return Ok(old.clone());
        }
        if eta == 0.0 {
            return Ok(batch_mean.clone());
        }
        let pair = WeightedPointCloud::new(self.geometry, vec![old.clone(), batch_mean.clone()], vec![eta, 1.0 - eta])?;
        Ok(solve_frechet(&pair, &self.solve_config)?.mean.into_coords())
    }

    /// One training step: normalizes the batch to `(μ', σ'²)` and updates the
    /// running statistics.
    pub fn train_step(&mut self, batch: &WeightedPointCloud) -> Result<WeightedPointCloud> {
        self.check_batch(batch)?;
        let (mu, var) = batch_statistics(batch, &self.solve_config)?;
        let sigma = (var + self.epsilon).sqrt();

        let old = self.running_mean.clone().unwrap_or_else(|| mu.clone());
        if self.step_count == 0 {
            self.running_variance = 0.0;
        }
        let running_mean = self.blend_running_mean(&old, &mu)?;
        self.step_count += 1;
        let t = self.step_count as f64;
        self.running_variance = ((t - 1.0) * self.running_variance + sigma) / t;
        self.running_mean = Some(running_mean);

        let target = self.target_mean.clone();
        self.normalize(batch, &mu, sigma, &target, self.target_variance.sqrt())
    }

    /// Inference: recomputes the batch statistics and maps them onto
    /// `(μ_test, σ_test)`.
    pub fn infer(&self, batch: &WeightedPointCloud) -> Result<WeightedPointCloud> {
        self.check_batch(batch)?;
        let running = self
            .running_mean
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("inference needs at least one training step".into()))?;
        let (mu, var) = batch_statistics(batch, &self.solve_config)?;
        let sigma = (var + self.epsilon).sqrt();
        self.normalize(batch, &mu, sigma, running, self.running_variance)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StateJson {
            model: self.geometry.model(),
            curvature: self.geometry.k(),
            target_mean: self.target_mean.iter().copied().collect(),
            target_variance: self.target_variance,
            running_mean: self.running_mean.as_ref().map(|m| m.iter().copied().collect()),
            running_variance: self.running_variance,
            momentum: self.momentum,
            step_count: self.step_count,
            epsilon: self.epsilon,
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: StateJson = serde_json::from_str(s)?;
        let g = Geometry::new(j.model, j.curvature)?;
        let target = ManifoldPoint::new(g, DVector::from_vec(j.target_mean))?;
        let mut state = BatchNormState::new(&target, j.target_variance, j.momentum)?.with_epsilon(j.epsilon)?;
        if let Some(m) = j.running_mean {
            state.running_mean = Some(ManifoldPoint::new(g, DVector::from_vec(m))?.into_coords());
        }
        if !(j.running_variance >= 0.0) {
            return Err(Error::InvalidInput("running variance must be non-negative".into()));
        }
        state.running_variance = j.running_variance;
        state.step_count = j.step_count;
        Ok(state)
    }
}

/// [`BatchNormState::train_step`] as a free function.
pub fn rbn_train_step(state: &mut BatchNormState, batch: &WeightedPointCloud) -> Result<WeightedPointCloud> {
    state.train_step(batch)
}

/// [`BatchNormState::infer`] as a free function.
pub fn rbn_infer(state: &BatchNormState, batch: &WeightedPointCloud) -> Result<WeightedPointCloud> {
    state.infer(batch)
}

/// Component-wise mean and biased variance of a Euclidean cloud, i.e. the
/// Fréchet statistics of `ℝⁿ` viewed as a product of lines.
pub fn product_frechet_stats(cloud: &WeightedPointCloud) -> Result<(DVector<f64>, DVector<f64>)> {
    if cloud.geometry().model() != Model::Euclidean {
        return Err(Error::ModelMismatch { left: cloud.geometry().model(), right: Model::Euclidean });
    }
    let total = cloud.total_weight();
    let mut mean = DVector::zeros(cloud.ambient_dim());
    for (x, w) in cloud.points().iter().zip(cloud.weights()) {
        mean.axpy(*w / total, x, 1.0);
    }
    let mut var = DVector::zeros(mean.len());
    for (x, w) in cloud.points().iter().zip(cloud.weights()) {
        var += (x - &mean).map(|d| d * d) * (*w / total);
    }
    Ok((mean, var))
}

/// Riemannian batch norm on `ℝ × … × ℝ`: one independent one-dimensional
/// state per coordinate. Equivalent to per-feature batch normalization with
/// scale `σ'` and shift `μ'`.
#[derive(Clone, Debug)]
pub struct ProductBatchNorm {
    pub factors: Vec<BatchNormState>,
}

impl ProductBatchNorm {
    pub fn new(target_mean: &[f64], target_variance: f64, momentum: f64, epsilon: f64) -> Result<Self> {
        let line = Geometry::euclidean();
        let factors = target_mean
            .iter()
            .map(|m| BatchNormState::new(&ManifoldPoint::from_slice(line, &[*m])?, target_variance, momentum)?.with_epsilon(epsilon))
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() {
            return Err(Error::InvalidInput("product batch norm needs at least one coordinate".into()));
        }
        Ok(ProductBatchNorm { factors })
    }

    fn split(&self, batch: &WeightedPointCloud) -> Result<Vec<WeightedPointCloud>> {
        if batch.geometry().model() != Model::Euclidean {
            return Err(Error::ModelMismatch { left: batch.geometry().model(), right: Model::Euclidean });
        }
        if batch.ambient_dim() != self.factors.len() {
            return Err(Error::DimensionMismatch { expected: self.factors.len(), got: batch.ambient_dim() });
        }
        (0..self.factors.len())
            .map(|j| {
                let pts = batch.points().iter().map(|x| DVector::from_element(1, x[j])).collect();
                WeightedPointCloud::new(Geometry::euclidean(), pts, batch.weights().to_vec())
            })
            .collect()
    }

    fn join(parts: Vec<WeightedPointCloud>) -> Result<WeightedPointCloud> {
        let m = parts[0].len();
        let pts = (0..m)
            .map(|i| DVector::from_iterator(parts.len(), parts.iter().map(|p| p.points()[i][0])))
            .collect();
        WeightedPointCloud::unit(Geometry::euclidean(), pts)
    }

    pub fn train_step(&mut self, batch: &WeightedPointCloud) -> Result<WeightedPointCloud> {
        let parts = self.split(batch)?;
        let out = self.factors.iter_mut().zip(&parts).map(|(s, p)| s.train_step(p)).collect::<Result<Vec<_>>>()?;
        Self::join(out)
    }

    pub fn infer(&self, batch: &WeightedPointCloud) -> Result<WeightedPointCloud> {
        let parts = self.split(batch)?;
        let out = self.factors.iter().zip(&parts).map(|(s, p)| s.infer(p)).collect::<Result<Vec<_>>>()?;
        Self::join(out)
    }
}
