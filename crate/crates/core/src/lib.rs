//! Wavelet-based local Whittle estimation of multivariate long-memory
//! processes with quasi-analytic common-factor wavelets.
//!
//! The pipeline runs `filters` → `transform` → `scalogram` → `whittle`,
//! with `asymptotics` supplying standard errors. `simulate` and
//! `montecarlo` generate synthetic data with known parameters, and
//! `connectivity` builds thresholded correlation graphs from a group of fits.

pub mod asymptotics;
pub mod cli;
pub mod connectivity;
pub mod error;
pub mod filters;
pub mod io;
pub mod linalg;
pub mod montecarlo;
pub mod optim;
pub mod quad;
pub mod scalogram;
pub mod simulate;
pub mod transform;
pub mod whittle;

pub use error::{Error, Result};
pub use filters::{ComplexFilterBank, Variant};
pub use num_complex::Complex64;
