//! Sampling, hull and winding geometry, and exact-constant verification for
//! the planar Brownian loop.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bridge;
mod error;
pub mod geometry;
pub mod grid;
pub mod hull;
pub mod mc;
pub mod render;
pub mod refine;
pub mod seed;
pub mod sle;
pub mod stats;

pub use bridge::{BridgeSpec, LoopKind, LoopPath};
pub use error::{Error, Result};
pub use geometry::PlanarPoint;
pub use grid::{CellMask, GridSpec, MaskRole};
pub use hull::{PathAnalysis, RegionAreas, WindingField};
