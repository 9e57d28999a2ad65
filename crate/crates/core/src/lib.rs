//! Desk-scale instance space study of QAOA parameter initialisation for MaxCut.
//!
//! The crate covers the whole experimental pipeline:
//!
//! - [`graph`]: seven MaxCut instance classes, edge-list I/O and seeded batch ids.
//! - [`features`]: the 28-entry structural, spectral and symmetry feature vector.
//! - [`qsim`]: exact statevector evaluation of the QAOA energy.
//! - [`optim`]: ADAM over `(gamma, beta)` with evaluation-stamped traces.
//! - [`strategies`]: random, TQA, instance-class medians and 3-regular transfer.
//! - [`eval`]: the iterations-to-threshold score, labels and meta-data rows.
//! - [`isaproj`]: the fixed linear map into the 2D instance space.
//! - [`pipeline`]: batch orchestration used by the `qaoa-lab` binary.
//!
//! Numerical kernels are generic over [`Real`]; the aliases below pin the
//! double-precision types the pipeline uses.

pub mod eval;
pub mod features;
pub mod graph;
pub mod isaproj;
pub mod optim;
pub mod pipeline;
pub mod qsim;
pub mod scalar;
pub mod strategies;

mod format;

pub use scalar::Real;

pub use eval::{EvalConfig, MetaDataRow, PerInstanceResult};
pub use features::FeatureVector;
pub use graph::{GenConfig, Graph, InstanceClass};
pub use optim::{AdamConfig, OptTrace, RunRecord};
pub use qsim::{CostTable, QaoaParams};
pub use strategies::{MedianParamTable, StrategyTag};

/// Double-precision statevector, used for every energy in the pipeline.
pub type StateVector64 = qsim::StateVector<f64>;
/// Single-precision statevector.
pub type StateVector32 = qsim::StateVector<f32>;
/// Double-precision eigen-decomposition of a symmetric matrix.
pub type SymmetricEigen64 = features::linalg::SymmetricEigen<f64>;
/// Double-precision symmetric spectrum.
pub type SymmetricSpectrum64 = features::linalg::SymmetricSpectrum<f64>;
/// Projection into the instance space with `f64` coefficients.
pub type ProjectionSpec64 = isaproj::ProjectionSpec<f64>;
/// Z-score statistics in `f64`.
pub type NormalizationStats64 = isaproj::NormalizationStats<f64>;
