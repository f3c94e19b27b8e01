//! Item response theory calibration and scoring for dichotomous tests,
//! together with an audit of the partial consistent order between answer
//! patterns and ability estimates.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod audit;
pub mod calibration;
pub mod dimensionality;
pub mod error;
mod item_fit;
pub mod math;
pub mod model;
pub mod report;
pub mod scoring;
pub mod simulation;

pub use error::{Boundary, Error, Result};
pub use model::{icc_prob, Item, ItemBank, ModelKind, QuadratureGrid, ResponseMatrix};
