//! Finite-dimensional approximations of Koopman and Perron-Frobenius
//! operators built from multiscale wavelet bases, spectral eigenbases and
//! input-output samples.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod edmd;
pub mod error;
pub mod measures;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod spectral;
pub mod transfer;
pub mod transport;
pub mod warped;

pub use error::{Error, Result};
