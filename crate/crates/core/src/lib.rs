//! Numerical differential geometry of four-dimensional manifolds carrying an
//! almost hypercomplex structure with pseudo-Hermitian metrics of neutral
//! signature.
//!
//! The crate evaluates metrics given in closed form on a chart (or induced by
//! an embedding, or by a left-invariant frame on a Lie group), differentiates
//! them with second-order forward-mode jets, and produces curvature,
//! structural tensors, signed norms, scalar invariants, and class membership
//! verdicts for a built-in catalog of ten example geometries.

// Tensor kernels use explicit index loops throughout; iterator rewrites of
// fixed 4x4x4x4 contractions read worse, not better.
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod chart;
pub mod classify;
pub mod error;
pub mod expr;
pub mod homogeneous;
pub mod hstructure;
pub mod invariants;
pub mod jet;
pub mod runner;

pub use chart::{ChartMetric, Embedding, FrameField, FrameSnapshot};
pub use error::{GeomError, Result};
pub use expr::Expr;
pub use hstructure::{standard_h, HTriple};
pub use jet::{Jet2, DIM};
