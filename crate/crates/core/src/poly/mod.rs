//! Trigonometric and algebraic polynomials, interval systems and sup norms.

mod alg;
mod cheb;
mod complex;
mod interval;
mod supnorm;
mod trig;

pub use alg::AlgPoly;
pub use cheb::ChebSeries;
pub use complex::ComplexPoly;
pub use interval::IntervalSet;
pub use supnorm::{sup_norm, sup_norm_with, SupNorm, SupNormOptions};
pub use trig::TrigPoly;

pub(crate) use supnorm::sup_on_interval;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("nonzero mean {0:e}: no periodic antiderivative")]
    NonzeroMean(f64),
    #[error("integer and half-integer frequencies cannot be mixed")]
    MixedParity,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("invalid interval set: {0}")]
    InvalidSet(String),
}
