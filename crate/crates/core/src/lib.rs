//! Exact and numeric machinery for the energy expansion of fractional Yamabe
//! bubbles perturbed by a Weyl-type metric.

pub mod error;
pub mod exact_algebra;
pub mod quadrature;
pub mod special_functions;
pub mod moment_reduction;
pub mod fourier_engine;
pub mod weyl_tensor;
pub mod energy_polynomial;
pub mod critical_analysis;

pub use error::{Error, Result};
