//! Error mitigation: Pauli twirling of CX, controlled noise amplification, Richardson
//! extrapolation to zero noise, and readout filtering.

pub mod amplify;
pub mod filter;
pub mod pipeline;
pub mod richardson;
pub mod twirl;

pub use amplify::{amplification_probability, amplify_noise};
pub use filter::{apply_filter, build_calibration, nnls, CalibrationMatrix};
pub use pipeline::{zne_pipeline, NodeEstimate, ZneOptions, ZneReport, DEFAULT_RS};
pub use richardson::{richardson, richardson_coefficients, ExtrapolationPoint, ExtrapolationSeries};
pub use twirl::{twirl_cx, TwirlRow, TwirlTable};
