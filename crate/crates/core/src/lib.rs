//! Perturbed alternating projections on closed convex sets of `ℝ^d`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod engine;
pub mod sets;
pub mod variational;
pub mod constructions;

pub use error::{Error, Result};
pub use geometry::Point;
