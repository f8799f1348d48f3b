//! Interference, outage and local throughput of slotted-Aloha ad hoc
//! networks whose transmitters form an isotropic, non-stationary Poisson
//! point process with intensity `lambda F(|x|)`.
//!
//! * [`model`]: shape functions, channel parameters, scenario validation.
//! * [`quadrature`]: adaptive integration and the closed-form identities.
//! * [`analytic`]: interference-driving functions, Laplace transform, outage.
//! * [`throughput`]: differential transmission capacity, average sum
//!   throughput, sum-rate optimization over the SINR threshold.
//! * [`sim`]: Monte Carlo network simulator used as an independent oracle.
//! * [`table`] and [`curves`]: tabular output and the curve generators behind
//!   the command-line tool.

pub mod analytic;
pub mod curves;
pub mod error;
pub mod model;
pub mod quadrature;
pub mod sim;
pub mod table;
pub mod throughput;

pub use error::{Error, Result};
