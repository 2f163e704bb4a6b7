//! Chromatic derivatives and chromatic expansions with point-varying weights.
//!
//! The library builds orthonormal polynomial systems for classical and generic
//! weights, turns them into Gauss quadrature rules, and wires them into five
//! integral-transform kernels (Fourier, Laplace, one-dimensional Bargmann,
//! generalized Walsh, Poisson wavelet). On top of that sit chromatic bases
//! with segment-wise varying weights, summability means, best-approximation
//! proxies, convergence experiments, and a dyadic arithmetic layer for the
//! Walsh case.

pub mod approx;
pub mod chromatic;
pub mod dyadic;
pub mod error;
pub mod kernels;
pub mod orthopoly;
pub mod quad;
pub mod special;
pub mod wavelet;

pub use error::{CoreError, Result};

/// Library version string embedded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
