//! Numerical laboratory for branch presence in repeated quantum measurements.
//!
//! * [`quantum`]: states, presence densities, unitary evolution, detector and
//!   observer entanglement, partial traces.
//! * [`branching`]: statistics of `N` repeated measurements: exact branch
//!   enumeration, the binomial count distribution, its Gaussian and histogram
//!   forms, Chebyshev tails and frequency operators.
//! * [`inference`]: Bayesian estimation of the single-event parameter from an
//!   observed relative frequency.
//! * [`decision`]: expected utility under branch weights and the cost of
//!   weights that disagree with presence.

// guards are written `!(x > 0.0)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binomial;
pub mod branching;
pub mod decision;
mod error;
pub mod inference;
pub mod quantum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use branching::{CountDistribution, RepeatedExperiment};
pub use quantum::{BasisLabel, PresenceDistribution, StateVector};
