//! Continuum-percolation toolkit for d-dimensional Poisson random geometric
//! graphs on a torus.
//!
//! The crate computes cluster coefficients of random geometric graphs
//! (closed form, quadrature, series, and chain-conditioned Monte Carlo),
//! turns them into lower bounds on the critical mean degree and critical
//! density, estimates percolation thresholds by seeded Monte Carlo sweeps,
//! and implements the active-saturated exploration process together with
//! the stochastic-dominance and Chernoff-tail utilities used to check the
//! subcritical logarithmic growth property empirically.
//!
//! All numeric kernels are generic over the scalar type via [`Real`]
//! (`f32` or `f64`); the concrete `f64` aliases below are what the CLI and
//! most callers use.

// Validation guards are written `!(x > 0)` so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod cluster;
pub mod components;
pub mod error;
pub mod exploration;
pub mod geometry;
pub mod numerics;
pub mod percolation;
pub mod rgg;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` point, the default for simulation work.
pub type Point64 = geometry::Point<f64>;
/// `f64` torus.
pub type TorusBox64 = geometry::TorusBox<f64>;
/// `f64` point set.
pub type PointSet64 = rgg::PointSet<f64>;
/// `f64` random geometric graph.
pub type Graph64 = rgg::Graph<f64>;
/// `f64` cluster-coefficient estimate.
pub type CoefficientEstimate64 = cluster::CoefficientEstimate<f64>;
/// `f64` bound report.
pub type BoundResult64 = bounds::BoundResult<f64>;
/// `f64` percolation curve.
pub type PercolationCurve64 = percolation::PercolationCurve<f64>;
