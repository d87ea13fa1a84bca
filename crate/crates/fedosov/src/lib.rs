//! Exact polarized deformation quantization on a single polynomial chart.

pub mod algebra;
pub mod chart;
pub mod checks;
pub mod darboux;
pub mod engine;
pub mod error;
pub mod fiber;
pub mod geometry;
pub mod hochschild;
pub mod serial;

pub use algebra::{BaseForm, ChartPoly, Scalar, TSeries};
pub use error::{AlgebraError, EngineError};
