//! High-precision laboratory for the Rogers–Ramanujan continued fraction
//! R(x) and its reciprocal K(x) = x^(1/5)/R(x): evaluation on, inside and
//! outside the unit circle, explicit points of divergence on the circle, and
//! machine checks of the quantitative bounds that govern the convergents.

pub mod bigarith;
pub mod cfrac;
pub mod error;
pub mod rrcf;
pub mod schur;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
