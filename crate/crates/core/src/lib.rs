//! Downlink coverage analysis for orthogonal random precoding (ORP) in
//! massive MIMO.
//!
//! Three independent routes to the same quantity keep each other honest:
//!
//! - [`analytic`]: exact closed-form coverage probabilities for the ORP
//!   scheme variants and the space-time-coded baseline, plus the max-SINR
//!   CDF and optimal beam-count search;
//! - [`simulator`]: reproducible link-level Monte Carlo with per-trial RNG
//!   substreams;
//! - [`oracle`]: adaptive 2-D quadrature of the joint density of the best
//!   beam's signal and interference powers.
//!
//! [`config`] holds the scenario types shared by all of them, [`randgen`]
//! the Rayleigh channel and Haar precoder sampling.

pub mod analytic;
pub mod config;
pub mod numeric;
pub mod oracle;
pub mod randgen;
pub mod simulator;
pub mod stats;

pub use config::{db_to_linear, linear_to_db, validate, ComplexScalar, Scheme, SystemConfig};
pub use simulator::CoverageEstimate;
