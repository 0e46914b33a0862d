//! Simulation and validation of fractionally integrated COGARCH processes.
//!
//! The crate generates Lévy and fractional subordinator paths, evaluates
//! the fractional kernels and the second-order theory of the modified
//! Mandelbrot–van Ness subordinator, simulates COGARCH/FICOGARCH volatility
//! and price paths, and bundles the statistical estimators and acceptance
//! checks used to validate all of it.
//!
//! Numerical code is generic over [`real::Real`] (implemented for `f32` and
//! `f64`); the `*F64` aliases below name the common double-precision types.
//!
//! ```
//! use ficogarch::{fracsub, kernels::KernelSpec, levy::{JumpSize, LevySpec, PathGrid}};
//!
//! let kernel = KernelSpec::modified_mvn(1.0, -0.25).unwrap();
//! let driver = fracsub::Driver::Subordinator(LevySpec::compound_poisson(1.0, JumpSize::Exponential { rate: 1.0 }));
//! let cfg = fracsub::FracSubConfig::new(kernel, driver, PathGrid::span(0.0, 5.0, 0.01).unwrap());
//! let path = fracsub::frac_path(&cfg, 42).unwrap();
//! assert!(path.is_non_decreasing());
//! ```

pub mod cogarch;
pub mod config;
pub mod covariance;
pub mod error;
pub mod fracsub;
pub mod kernels;
pub mod levy;
pub mod manifest;
pub mod quadrature;
pub mod real;
pub mod seed;
pub mod special;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
pub use real::Real;

pub type LevySpecF64 = levy::LevySpec<f64>;
pub type PathGridF64 = levy::PathGrid<f64>;
pub type SamplePathF64 = levy::SamplePath<f64>;
pub type KernelSpecF64 = kernels::KernelSpec<f64>;
pub type FracSubConfigF64 = fracsub::FracSubConfig<f64>;
pub type FicogarchParamsF64 = cogarch::FicogarchParams<f64>;
pub type PdqParamsF64 = cogarch::PdqParams<f64>;
pub type VolatilityPathF64 = cogarch::VolatilityPath<f64>;
pub type CovarianceReportF64 = covariance::CovarianceReport<f64>;
