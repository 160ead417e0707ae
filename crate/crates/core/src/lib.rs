//! Construction, conversion and testing of 2N-storage (Williamson) explicit
//! Runge-Kutta methods.

pub mod conditions;
pub mod construct;
pub mod convert;
pub mod integrate;
pub mod numerics;
pub mod refine;
pub mod schemes;
pub mod search;
