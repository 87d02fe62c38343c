//! Real-root statistics of generalized Kac random polynomials
//! `P_n(x) = sum_j xi_j c_j x^j`.
//!
//! Two independent routes to the mean and variance of the number of real
//! roots are provided: exact per-sample root counting driven by Monte Carlo
//! ([`montecarlo`]), and numerical quadrature of the Kac-Rice correlation
//! functions ([`kacrice`]). [`asymptotics`] holds the limiting constants both
//! are compared against, and [`experiments`] runs sweeps over the degree.

pub mod asymptotics;
pub mod coeff_models;
pub mod error;
pub mod experiments;
pub mod kacrice;
pub mod montecarlo;
pub mod quadrature;
pub mod regions;
pub mod rootcount;
pub mod sampling;

pub use coeff_models::{CoefficientModel, ConditionReport};
pub use error::{Error, Result};
pub use regions::{Region, RegionSpec};

/// Version string embedded in generated artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
