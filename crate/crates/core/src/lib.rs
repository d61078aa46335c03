//! Spectral laboratory for the Oseen and Navier–Stokes equations on a periodic box.
//!
//! The box `[0, 2πL)^n` stands in for the whole space. The crate provides the
//! linear steady and time-periodic Oseen solvers, norm surrogates used in the
//! a-priori estimates, the boundary lifting and nonlinearity, exponent
//! arithmetic, a Picard fixed-point driver, and the experiment harness that
//! ties them together.

pub mod error;
pub mod fields;
pub mod fixedpoint;
pub mod harness;
pub mod lifting;
pub mod nonlinear;
pub mod norms;
pub mod oseen;
pub mod samples;

pub use error::{Error, Result};
pub use fields::{GridSpec, ScalarField, SpectralField, TimePeriodicField, VectorField};
