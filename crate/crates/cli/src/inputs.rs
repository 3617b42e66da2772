use std::path::{Path, PathBuf};

use qpoker_core::circuit::reference_hand_circuit;
use qpoker_core::device::load_device;
use qpoker_core::{Circuit, DeviceModel, NoiseConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Name of the built-in reference hand circuit.
pub const REFERENCE: &str = "reference";

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn resolve(base: Option<&Path>, spec: &str) -> PathBuf {
    match base {
        Some(dir) if Path::new(spec).is_relative() => dir.join(spec),
        _ => PathBuf::from(spec),
    }
}

/// `reference` or a `.qpc.json` path.
pub fn load_circuit(spec: &str, base: Option<&Path>) -> CliResult<Circuit> {
    if spec == REFERENCE {
        return Ok(reference_hand_circuit());
    }
    Ok(Circuit::from_json(&read_text(&resolve(base, spec))?)?)
}

/// A shipped device name (`qx2`, `ourense`), `ideal:N`, or a device JSON path.
pub fn load_device_spec(spec: &str, base: Option<&Path>) -> CliResult<DeviceModel> {
    if let Some(d) = DeviceModel::builtin(spec) {
        return Ok(d);
    }
    if let Some(n) = spec.strip_prefix("ideal:") {
        let n: usize = n.parse().map_err(|_| CliError::invalid(format!("bad qubit count in {spec}")))?;
        if !(1..=qpoker_core::qcore::state::MAX_QUBITS).contains(&n) {
            return Err(CliError::invalid(format!("{n} qubits unsupported")));
        }
        return Ok(DeviceModel::ideal(n));
    }
    Ok(load_device(&read_text(&resolve(base, spec))?)?)
}

/// Which noise model to run under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    /// The device's own rates, CX rates scaled by `scale`.
    Device {
        #[serde(default = "one")]
        scale: f64,
    },
    Ideal,
    Explicit {
        config: NoiseConfig,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::Device { scale: 1.0 }
    }
}

impl NoiseSpec {
    pub fn build(&self, device: &DeviceModel) -> CliResult<NoiseConfig> {
        let cfg = match self {
            NoiseSpec::Device { scale } => NoiseConfig::from_device(device).scaled(*scale)?,
            NoiseSpec::Ideal => NoiseConfig::ideal(device.num_qubits()),
            NoiseSpec::Explicit { config } => config.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
