//! Symbolic correlation integral (SCI) and Renyi-2 permutation entropy for
//! time series: ordinal-pattern estimation, HAC long-run variance, a
//! two-sample equality-of-DGP test with KS and spectral competitors, DGP
//! simulators and a Monte Carlo size/power harness.

pub mod dgp;
pub mod entropy;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod patterns;
pub mod rng;
#[allow(clippy::module_inception)]
pub mod sci;
pub mod testing;
pub mod variance;

pub use error::{Result, SciError};
