//! Spectral-norm error of the Gaussian sample covariance.
//!
//! Computes the first-order deterministic equivalent E_*(Σ) of
//! E‖Σ̂ − Σ‖_op/‖Σ‖_op through an exact solver for Gaussian widths over
//! spherical slices of the standardized ellipsoid, evaluates the closed-form
//! spiked-covariance transition curves, and checks both against direct
//! simulation of Σ̂.

pub mod cli;
pub mod covmodel;
pub mod error;
pub mod estar;
pub mod mcsim;
pub mod optim;
pub mod slicewidth;
pub mod spiked;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
