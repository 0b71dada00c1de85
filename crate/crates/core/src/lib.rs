//! Measures how far a finite metric graph is from being Gromov-hyperbolic or
//! a real tree: per-triangle Rips constants and their scale profile, detour
//! growth, Euclidean reference constants, the tower construction and a
//! rescaled four-point proxy for asymptotic cones.

// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detour;
pub mod error;
pub mod euclid;
pub mod plot;
pub mod report;
pub mod rips;
pub mod sampler;
pub mod space;
pub mod tower;

pub use error::{Error, Result};
pub use rips::{Band, ScaleProfile, Thresholds, Triangle, Verdict};
pub use sampler::SamplerSpec;
pub use space::{DistanceMatrix, Geodesic, MetricGraph};

/// Crate version, recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
