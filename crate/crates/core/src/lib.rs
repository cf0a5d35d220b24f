//! Exact-arithmetic toolkit for the maximum consecutive subsums problem and
//! (min,+)-convolution: naive kernels, the linear reductions between the two
//! problems, and the unique-configuration machinery (strict LP feasibility,
//! pruned census, exponential family, random-path estimator).

pub mod census;
pub mod configurations;
pub mod decimal;
pub mod estimator;
pub mod error;
pub mod family;
pub mod feasibility;
pub mod gamma;
pub mod kernels;
pub mod reductions;
mod serde_ext;

pub use error::{Error, Result};
