//! Grids, field storage, transforms and spectral operators.

pub mod fft;
mod field;
mod grid;
pub mod io;
pub mod ops;
mod timeperiodic;

pub use field::{PhysicalField, ScalarField, SpectralField, VectorField};
pub use grid::GridSpec;
pub use ops::{dealiased_product, spectral_derivative};
pub use timeperiodic::TimePeriodicField;
