//! Gaussian random polynomials attached to analytic plane domains.
//!
//! The crate builds orthonormal polynomial bases for boundary (Szegő) and
//! area (Bergman) inner products, samples random linear combinations with
//! i.i.d. complex Gaussian coefficients, studies their zeros, and evaluates
//! the universal scaling limits of the zero density and pair correlation
//! near the boundary.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod ensemble;
pub mod error;
pub mod numerics;
pub mod orthopoly;
pub mod scaling;
pub mod stats;

pub use domain::{DomainSpec, OuterFunction, WeightSpec};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::{BoundaryQuadrature, MonomialPolynomial};
pub use orthopoly::{KernelEvaluation, OrthonormalBasis};
pub use scaling::Section;

/// Version string reported in run summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
