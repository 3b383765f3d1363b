//! Python bindings: geometry primitives, Fréchet mean solvers, Jacobians,
//! pseudo-means and Riemannian batch normalization.
//!
//! Points are plain lists of floats. Every function takes the model name
//! (`"poincare"`, `"hyperboloid"`, `"klein"` or `"euclidean"`) and the curvature.

use hyperfrechet::batch_norm::BatchNormState;
use hyperfrechet::grad::frechet_jacobians;
use hyperfrechet::manifold::{self as mf, Geometry, ManifoldPoint, Model};
use hyperfrechet::pseudo::{self, TangentBase};
use hyperfrechet::solvers::{solve_with, SolveConfig, SolverKind};
use hyperfrechet::WeightedPointCloud;
use nalgebra::DVector;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: hyperfrechet::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn geometry(model: &str, curvature: f64) -> PyResult<Geometry> {
    let m: Model = model.parse().map_err(err)?;
    Geometry::new(m, if m == Model::Euclidean { 0.0 } else { curvature }).map_err(err)
}

fn point(g: Geometry, x: Vec<f64>) -> PyResult<ManifoldPoint> {
    ManifoldPoint::new(g, DVector::from_vec(x)).map_err(err)
}

fn cloud(g: Geometry, points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> PyResult<WeightedPointCloud> {
    let pts: Vec<DVector<f64>> = points.into_iter().map(DVector::from_vec).collect();
    let w = weights.unwrap_or_else(|| vec![1.0; pts.len()]);
    WeightedPointCloud::new(g, pts, w).map_err(err)
}

fn vec(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

/// Geodesic distance between `x` and `y`.
#[pyfunction]
fn distance(model: &str, curvature: f64, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    let g = geometry(model, curvature)?;
    mf::distance(&point(g, x)?, &point(g, y)?).map_err(err)
}

/// Exponential map `exp_x(v)`.
#[pyfunction]
fn exp_map(model: &str, curvature: f64, x: Vec<f64>, v: Vec<f64>) -> PyResult<Vec<f64>> {
    let g = geometry(model, curvature)?;
    let t = mf::TangentVector::new(point(g, x)?, DVector::from_vec(v)).map_err(err)?;
    Ok(mf::exp_map(&t).map_err(err)?.to_vec())
}

/// Logarithmic map `log_x(y)`.
#[pyfunction]
fn log_map(model: &str, curvature: f64, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
    let g = geometry(model, curvature)?;
    Ok(vec(mf::log_map(&point(g, x)?, &point(g, y)?).map_err(err)?.vec()))
}

/// Parallel transport of `v` from `x` to `y`.
#[pyfunction]
fn parallel_transport(model: &str, curvature: f64, x: Vec<f64>, y: Vec<f64>, v: Vec<f64>) -> PyResult<Vec<f64>> {
    let g = geometry(model, curvature)?;
    let t = mf::TangentVector::new(point(g, x)?, DVector::from_vec(v)).map_err(err)?;
    Ok(vec(mf::parallel_transport(&t, &point(g, y)?).map_err(err)?.vec()))
}

/// Möbius addition on the Poincaré ball.
#[pyfunction]
fn mobius_add(curvature: f64, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
    let g = geometry("poincare", curvature)?;
    Ok(mf::mobius_add(&point(g, x)?, &point(g, y)?).map_err(err)?.to_vec())
}

/// Converts `x` from `model` to `target`.
#[pyfunction]
fn convert(model: &str, curvature: f64, x: Vec<f64>, target: &str) -> PyResult<Vec<f64>> {
    let g = geometry(model, curvature)?;
    let to: Model = target.parse().map_err(err)?;
    Ok(mf::convert(&point(g, x)?, to).map_err(err)?.to_vec())
}

/// Weighted Fréchet mean. `solver` is `ours`, `karcher` or `rgd`.
#[pyfunction]
#[pyo3(signature = (model, curvature, points, weights=None, solver="ours", tol=1e-12, max_iters=1000, lr=None))]
#[allow(clippy::too_many_arguments)]
fn frechet_mean<'py>(
    py: Python<'py>,
    model: &str,
    curvature: f64,
    points: Vec<Vec<f64>>,
    weights: Option<Vec<f64>>,
    solver: &str,
    tol: f64,
    max_iters: usize,
    lr: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let c = cloud(geometry(model, curvature)?, points, weights)?;
    let kind: SolverKind = solver.parse().map_err(err)?;
    let config = SolveConfig { max_iters, step_tol: tol, learning_rate: lr, ..Default::default() };
    let r = solve_with(kind, &c, &config, &mut |_, _| false).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("mean", r.mean.to_vec())?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("converged", r.converged)?;
    d.set_item("objective_trace", r.objective_trace)?;
    d.set_item("wall_time_s", r.wall_time.as_secs_f64())?;
    Ok(d)
}

/// Jacobians of the mean with respect to points, weights and curvature.
#[pyfunction]
#[pyo3(signature = (model, curvature, points, weights=None, tol=1e-14))]
fn mean_jacobians<'py>(
    py: Python<'py>,
    model: &str,
    curvature: f64,
    points: Vec<Vec<f64>>,
    weights: Option<Vec<f64>>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let c = cloud(geometry(model, curvature)?, points, weights)?;
    let config = SolveConfig { max_iters: 10_000, step_tol: tol, ..Default::default() };
    let mean = hyperfrechet::solvers::solve_frechet(&c, &config).map_err(err)?.mean;
    let j = frechet_jacobians(&c, &mean).map_err(err)?;
    let rows = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> {
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    };
    let d = PyDict::new(py);
    d.set_item("mean", mean.to_vec())?;
    d.set_item("per_point", j.per_point.iter().map(rows).collect::<Vec<_>>())?;
    d.set_item("per_weight", j.per_weight.iter().map(vec).collect::<Vec<_>>())?;
    d.set_item("curvature_grad", vec(&j.curvature_grad))?;
    d.set_item("hessian_condition", j.hessian_condition)?;
    Ok(d)
}

/// Weighted Einstein midpoint, returned in the input model.
#[pyfunction]
#[pyo3(signature = (model, curvature, points, weights=None))]
fn einstein_midpoint(model: &str, curvature: f64, points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
    let c = cloud(geometry(model, curvature)?, points, weights)?;
    Ok(pseudo::einstein_midpoint(&c).map_err(err)?.to_vec())
}

/// Tangent-space aggregation at `base`.
#[pyfunction]
#[pyo3(signature = (model, curvature, points, base, weights=None))]
fn tangent_aggregation(model: &str, curvature: f64, points: Vec<Vec<f64>>, base: Vec<f64>, weights: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
    let g = geometry(model, curvature)?;
    let c = cloud(g, points, weights)?;
    Ok(pseudo::tangent_aggregation(&c, &point(g, base)?).map_err(err)?.to_vec())
}

/// `[(method, excess, distance), …]` for the true mean and both pseudo-means.
#[pyfunction]
#[pyo3(signature = (model, curvature, points, weights=None))]
fn variance_gap_report(model: &str, curvature: f64, points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> PyResult<Vec<(String, f64, f64)>> {
    let c = cloud(geometry(model, curvature)?, points, weights)?;
    let rows = pseudo::variance_gap_report(&c, TangentBase::Origin).map_err(err)?;
    Ok(rows.into_iter().map(|r| (r.method, r.excess, r.distance)).collect())
}

/// Riemannian batch normalization state.
#[pyclass(name = "BatchNorm")]
struct PyBatchNorm {
    state: BatchNormState,
}

#[pymethods]
impl PyBatchNorm {
    #[new]
    #[pyo3(signature = (model, curvature, target_mean, target_variance=1.0, momentum=0.9, epsilon=1e-5))]
    fn new(model: &str, curvature: f64, target_mean: Vec<f64>, target_variance: f64, momentum: f64, epsilon: f64) -> PyResult<Self> {
        let g = geometry(model, curvature)?;
        let state = BatchNormState::new(&point(g, target_mean)?, target_variance, momentum)
            .and_then(|s| s.with_epsilon(epsilon))
            .map_err(err)?;
        Ok(PyBatchNorm { state })
    }

    /// Normalizes a training batch and updates the running statistics.
    fn train_step(&mut self, points: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let c = cloud(*self.state.geometry(), points, None)?;
        let out = self.state.train_step(&c).map_err(err)?;
        Ok(out.points().iter().map(vec).collect())
    }

    /// Normalizes a test batch onto the running statistics.
    fn infer(&self, points: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let c = cloud(*self.state.geometry(), points, None)?;
        let out = self.state.infer(&c).map_err(err)?;
        Ok(out.points().iter().map(vec).collect())
    }

    fn to_json(&self) -> PyResult<String> {
        self.state.to_json().map_err(err)
    }

    #[getter]
    fn step_count(&self) -> u64 {
        self.state.step_count
    }
}

/// The `hyperfrechet` Python module.
#[pymodule]
#[pyo3(name = "hyperfrechet")]
pub fn hyperfrechet_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(exp_map, m)?)?;
    m.add_function(wrap_pyfunction!(log_map, m)?)?;
    m.add_function(wrap_pyfunction!(parallel_transport, m)?)?;
    m.add_function(wrap_pyfunction!(mobius_add, m)?)?;
    m.add_function(wrap_pyfunction!(convert, m)?)?;
    m.add_function(wrap_pyfunction!(frechet_mean, m)?)?;
    m.add_function(wrap_pyfunction!(mean_jacobians, m)?)?;
    m.add_function(wrap_pyfunction!(einstein_midpoint, m)?)?;
    m.add_function(wrap_pyfunction!(tangent_aggregation, m)?)?;
    m.add_function(wrap_pyfunction!(variance_gap_report, m)?)?;
    m.add_class::<PyBatchNorm>()?;
    Ok(())
}
