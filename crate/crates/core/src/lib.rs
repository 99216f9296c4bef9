// Multi-index tensor kernels read clearest with explicit index loops.
#![allow(clippy::needless_range_loop)]

//! Numerical tensor calculus and identity verification for almost contact
//! metric manifolds.
//!
//! The crate evaluates curvature, ⋆-Ricci, conformal, and soliton quantities
//! pointwise on chart-defined model spaces and checks the classical Sasakian
//! identities as residuals against stated tolerances. All evaluation is pure:
//! charts, structures, and fields are immutable and shareable across threads,
//! and sample batches fold into reports by order-independent max-reduction.

pub mod calculus;
pub mod contact;
pub mod conformal;
pub mod error;
pub mod jet;
pub mod models;
pub mod probe;
pub mod report;
pub mod sample;
pub mod soliton;
pub mod star_ricci;
pub mod suites;
pub mod tensor;

pub use calculus::{ChartManifold, DerivativeConfig, DomainBox, TensorField};
pub use contact::ContactStructure;
pub use error::{GeoError, Result};
pub use report::{PremiseStatus, ResidualReport};
pub use sample::SamplePlan;
pub use tensor::{MetricAtPoint, OrthonormalFrame, TensorValue};
