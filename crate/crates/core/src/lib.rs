//! Numerical core for studying linear precoding in TDD massive MIMO downlinks
//! when the base-station transmit and receive RF chains are mismatched.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It provides:
//!
//! - [`special`]: normal pdf/cdf/quantile and the error function of a complex argument,
//! - [`truncated`]: the truncated Gaussian law (density, moments, sampling, `E{exp(jX)}`),
//! - [`rf`]: RF error profiles, the derived error factors, and channel generation,
//! - [`linalg`]: the small amount of dense complex linear algebra the model needs,
//! - [`precoding`]: MRT/ZF precoders, power normalisation, per-user powers,
//! - [`analytic`]: closed-form output SINR, asymptotic limits and ZF/MRT ratios,
//! - [`montecarlo`]: the seeded trial engine and SINR estimator.

#![no_std]
// NaN-rejecting `!(x > 0.0)` checks and published coefficient tables are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod analytic;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod precoding;
pub mod quadrature;
pub mod rf;
pub mod special;
pub mod truncated;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}
