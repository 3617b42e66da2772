//! Dense simulation substrate: gates, pure states, density matrices, sampling and the
//! number-of-ones observable.

pub mod density;
pub mod gate;
pub mod observable;
pub mod sample;
pub mod state;

pub use density::{apply_channel, DensityMatrix};
pub use gate::{Gate, GateKind, Pauli};
pub use observable::{build_number_operator, expectation_ones, NumberOperator};
pub use sample::{sample, Counts};
pub use state::{apply_gate, run_circuit, simulate, StateVector};
