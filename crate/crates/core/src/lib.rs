//! Finite-dimensional quantum states and observables with numerical checks
//! of uncertainty relations and a branching model of measurement.
//!
//! Numerical code is generic over the real scalar [`Real`] (`f32` or `f64`).
//! The aliases at the crate root fix the scalar to `f64`, which is what the
//! default tolerances are calibrated for.

// `!(x > 0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod error;
pub mod linalg;
pub mod relations;
pub mod sampling;
pub mod scalar;
pub mod states;
pub mod tolerance;
pub mod worlds;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub type Complex64 = num_complex::Complex<f64>;

pub type ComplexMatrix = linalg::Matrix<f64>;
pub type SpectralDecomposition = linalg::SpectralDecomposition<f64>;
pub type QuantumState = states::StateVector<f64>;
pub type HermitianObservable = states::Observable<f64>;
pub type EigenvalueDistribution = states::BornDistribution<f64>;
pub type Interval = relations::Interval<f64>;
pub type RelationReport = relations::RelationReport<f64>;
pub type UffinkReport = relations::UffinkReport<f64>;
pub type BranchNode = worlds::BranchNode<f64>;
pub type BranchTree = worlds::BranchTree<f64>;
pub type PointerRecord = worlds::PointerRecord<f64>;

pub type ComplexMatrix32 = linalg::Matrix<f32>;
pub type QuantumState32 = states::StateVector<f32>;
pub type HermitianObservable32 = states::Observable<f32>;

/// Crate version, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
