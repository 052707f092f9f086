//! Spectral densities of Jacobi matrices that are small perturbations of the
//! free Hermite operator (weights sqrt(n), zero diagonal).
//!
//! The perturbed spectral density is recovered from the oscillatory basis
//! I_n^{+/-} of the free equation through a scattering-style coefficient F,
//! with everything cross-checked against truncated-matrix spectral measures
//! and quadrature oracles.

pub mod error;
pub mod freeop;
pub mod jacobi;
pub mod jost;
pub mod oracle;
pub mod quad;
pub mod special;
pub mod util;

pub use error::{Error, Result};
pub use num_complex::Complex64;
