//! Weighted Fréchet means in hyperbolic space.
//!
//! The crate provides exact geometry for the Poincaré ball and hyperboloid
//! models ([`manifold`]), fast first-order-bound solvers for the weighted
//! Fréchet mean alongside gradient-descent and Karcher-flow baselines
//! ([`solvers`]), analytic Jacobians of the mean with respect to its inputs
//! ([`grad`]), Riemannian batch normalization ([`batch_norm`]), pseudo-mean
//! baselines ([`pseudo`]) and the experiment harness behind the
//! `frechet-bench` binary ([`bench`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch_norm;
pub mod bench;
pub mod cloud;
pub mod error;
pub mod grad;
pub mod manifold;
pub mod pseudo;
pub mod scalar;
pub mod solvers;

pub use cloud::WeightedPointCloud;
pub use error::{Error, Result};
pub use manifold::{Curvature, Geometry, ManifoldPoint, Model, TangentVector};
