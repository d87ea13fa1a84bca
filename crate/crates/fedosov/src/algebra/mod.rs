//! Exact scalars, polynomials, truncated series and differential forms.

pub mod form;
pub mod homotopy;
pub mod literal;
pub mod poly;
pub mod scalar;
pub mod series;

pub use form::BaseForm;
pub use poly::{ChartPoly, Mono};
pub use scalar::Scalar;
pub use series::TSeries;
