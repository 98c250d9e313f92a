//! Exact computer algebra for cut-and-join and spectral-curve computations of
//! triple Hodge tau-functions.

pub mod caj;
pub mod checks;
pub mod constraints;
pub mod curve;
pub mod fock;
pub mod golden;
pub mod kdv;
pub mod operators;
pub mod scalar;
pub mod spectral;
pub mod series;

pub use series::{LaurentSeries, SeriesError};
pub use scalar::{ParamScalar, Rational, Scalar, ScalarError};
