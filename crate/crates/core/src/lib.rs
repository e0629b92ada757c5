//! Kinematic modeling and motion analysis for snake-mimicking soft robots
//! built from fiber-reinforced elastomeric enclosures (FREEs).
//!
//! - [`free_model`]: closed-form extension and bending of a single FREE, and
//!   inverse design of the fiber angle for a target curvature.
//! - [`assembly`]: genus templates and planar piecewise-constant-curvature
//!   rendering of multi-segment robots.
//! - [`analysis`]: rectification, resampling, smoothing and
//!   circumscribed-circle curvature of centerlines.
//! - [`compare`]: cross-trial envelopes, regional coverage and thrash
//!   duration statistics.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assembly;
pub mod batch;
pub mod centerline;
pub mod compare;
mod error;
pub mod free_model;
mod roots;

pub use centerline::{Centerline, Point, Units};
pub use error::{Error, Result};
