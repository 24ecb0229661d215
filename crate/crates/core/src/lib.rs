//! Exact values, analytic bounds and Monte Carlo estimates for the
//! normalized measure of `{x : ‖Ax‖ < δ‖A‖‖x‖}` on the unit sphere, for wide
//! full-rank matrices `A` described by their singular values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod exact;
pub mod montecarlo;
pub mod numeric;
pub mod spectrum_file;
pub mod sweep;

pub use error::{Error, Result};
pub use exact::{Dimensions, MeasureResult, Method};
pub use numeric::LogValue;
