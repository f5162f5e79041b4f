//! Fast-oscillating noise on fine uniform grids and non-asymptotic algebraic
//! estimators built on it.
//!
//! * [`hypergrid`]: grids, left-sum integration, iterated integrals and the
//!   oscillation norm.
//! * [`noise`]: reproducible noise generators and the numeric noise test.
//! * [`estimator`]: kernel estimators, divisors, window sweeps and
//!   polynomial-annihilating kernels.
//! * [`demod`]: symbol detection and error rates under burst noise.
//! * [`expcli`]: JSON-configured experiments that emit CSV reports.

pub mod csvfmt;
pub mod demod;
pub mod error;
pub mod estimator;
pub mod expcli;
pub mod hypergrid;
pub mod legendre;
pub mod noise;
pub mod rng;

pub use error::{Error, Result};
pub use hypergrid::{GridFunction, GridSpec};
