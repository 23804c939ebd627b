//! Generalized metrics on quadratic Lie algebras, the one-loop generalized
//! Ricci tensor and its renormalization-group flow, signed Feynman diagrams,
//! and Monte Carlo checks of the hyperbolic propagator integrals behind them.
//!
//! Linear-algebra types are generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases below fix the scalar for the common cases.

pub mod algebra;
pub mod diagrams;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod poly;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Algebra = algebra::QuadraticLieAlgebra<f64>;
pub type Metric = algebra::GeneralizedMetric<f64>;
pub type SplitPairing = algebra::SplitInversePairing<f64>;
pub type Tensor = diagrams::TensorFactor<f64>;
pub type Courant = flow::CourantData<f64>;
pub type State = flow::FlowState<f64>;

pub type Algebra32 = algebra::QuadraticLieAlgebra<f32>;
pub type Metric32 = algebra::GeneralizedMetric<f32>;
pub type Tensor32 = diagrams::TensorFactor<f32>;
pub type State32 = flow::FlowState<f32>;
