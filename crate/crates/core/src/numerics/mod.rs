//! Exact rational arithmetic, extended-precision floats and quadratic roots.

mod extfloat;
mod quadratic;
mod rational;
mod scalar;

use thiserror::Error;

pub use extfloat::{parse_decimal_exact, ExtFloat, DEFAULT_PRECISION, MIN_PRECISION};
pub use quadratic::{solve_quadratic, solve_quadratic_with_precision, QuadraticRoots, Root, ROOT_PRECISION};
pub use rational::{q, rational_sqrt, Rational};
pub use scalar::{sum_like, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}
