//! Simulation and error-mitigation toolkit for quantum poker circuits.
//!
//! The numeric core ([`qcore`], [`mitigation::richardson`], [`mitigation::filter`]) is generic
//! over the scalar type through [`Real`]; the aliases below fix the common `f64`/`f32` choices.

pub mod circuit;
pub mod device;
pub mod error;
pub mod mitigation;
pub mod noisesim;
pub mod qcore;
pub mod scalar;
pub mod transpiler;

pub use circuit::{Circuit, LayoutPermutation, Tag};
pub use device::DeviceModel;
pub use error::{QError, QResult};
pub use noisesim::NoiseConfig;
pub use qcore::gate::{Gate, GateKind};
pub use qcore::sample::Counts;
pub use scalar::Real;

/// Double-precision statevector, the default simulation substrate.
pub type StateVector = qcore::state::StateVector<f64>;
/// Single-precision statevector.
pub type StateVector32 = qcore::state::StateVector<f32>;
/// Double-precision density matrix.
pub type DensityMatrix = qcore::density::DensityMatrix<f64>;
/// Single-precision density matrix.
pub type DensityMatrix32 = qcore::density::DensityMatrix<f32>;
/// Double-precision readout calibration matrix.
pub type CalibrationMatrix = mitigation::filter::CalibrationMatrix<f64>;
/// Double-precision Richardson series.
pub type ExtrapolationSeries = mitigation::richardson::ExtrapolationSeries<f64>;
/// Complex amplitude at double precision.
pub type C64 = num_complex::Complex<f64>;
