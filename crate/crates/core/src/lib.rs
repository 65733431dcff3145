//! Generic representations of split SO(2l) over F_q: Bessel functions,
//! Rankin-Selberg zeta integrals against GL(n), gamma factors and a local
//! converse theorem check.

pub mod error;
pub mod field;
pub mod genrep;
pub mod groups;
pub mod harness;
pub mod mat;
pub mod numeric;
pub mod weyl;
pub mod zeta;

pub use error::{Error, Result};
