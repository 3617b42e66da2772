use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::device::DeviceModel;
use crate::error::{QError, QResult};
use crate::mitigation::amplify::amplify_noise;
use crate::mitigation::filter::{apply_filter, build_calibration, CalibrationMatrix};
use crate::mitigation::richardson::{ExtrapolationPoint, ExtrapolationSeries};
use crate::mitigation::twirl::twirl_cx;
use crate::noisesim::{check_conformant, sample_noisy, NoiseConfig};
use crate::qcore::observable::expectation_ones;
use crate::qcore::sample::Counts;

/// Default amplification nodes.
pub const DEFAULT_RS: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

const CALIBRATION_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZneOptions {
    pub rs: Vec<f64>,
    pub reps: usize,
    pub shots: u64,
    pub seed: u64,
    #[serde(default)]
    pub use_filter: bool,
    /// Shots per basis-state preparation when calibrating the filter.
    #[serde(default = "default_calibration_shots")]
    pub calibration_shots: u64,
    /// Twirl every CX before amplification.
    #[serde(default = "default_true")]
    pub twirl: bool,
}

fn default_calibration_shots() -> u64 {
    8192
}

fn default_true() -> bool {
    true
}

impl Default for ZneOptions {
    fn default() -> Self {
        ZneOptions {
            rs: DEFAULT_RS.to_vec(),
            reps: 256,
            shots: 1024,
            seed: 0,
            use_filter: false,
            calibration_shots: default_calibration_shots(),
            twirl: true,
        }
    }
}

/// Per-node statistics over repetitions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeEstimate {
    pub r: f64,
    pub mean: f64,
    pub stderr: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZneReport {
    pub nodes: Vec<NodeEstimate>,
    pub coefficients: Vec<f64>,
    pub extrapolated: f64,
    pub extrapolated_stderr: f64,
    #[serde(skip)]
    pub calibration: Option<CalibrationMatrix<f64>>,
}

impl ZneReport {
    pub fn series(&self) -> QResult<ExtrapolationSeries<f64>> {
        ExtrapolationSeries::new(
            self.nodes
                .iter()
                .map(|n| ExtrapolationPoint { r: n.r, value: n.mean, stderr: Some(n.stderr) })
                .collect(),
        )
    }
}

/// Sample mean and `σ/√k` of a set of values.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Random stream for one `(node, repetition)` job.
pub fn job_rng(seed: u64, node: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((node as u64) << 32) | rep as u64);
    rng
}

/// Expectation of the ones-count, optionally after readout filtering.
pub fn counts_expectation(counts: &Counts, filter: Option<&CalibrationMatrix<f64>>) -> QResult<f64> {
    match filter {
        None => counts.expectation_ones(),
        Some(cal) => expectation_ones(&apply_filter(cal, &counts.probabilities())?),
    }
}

/// One repetition: twirl, amplify by `r`, run noisily and reduce to an expectation.
pub fn run_repetition(
    circuit: &Circuit,
    device: &DeviceModel,
    noise: &NoiseConfig,
    r: f64,
    shots: u64,
    twirl: bool,
    filter: Option<&CalibrationMatrix<f64>>,
    rng: &mut ChaCha8Rng,
) -> QResult<f64> {
    let twirled = if twirl { twirl_cx(circuit, rng) } else { circuit.clone() };
    let amplified = amplify_noise(&twirled, device, r, rng)?;
    let counts = sample_noisy(&amplified, device, noise, shots, rng)?;
    counts_expectation(&counts, filter)
}

/// Zero-noise extrapolation of the ones-count expectation of a device-conformant circuit.
///
/// Every `(r, repetition)` pair is an independent job with its own random stream, so the
/// result does not depend on how jobs are scheduled across threads.
pub fn zne_pipeline(circuit: &Circuit, device: &DeviceModel, noise: &NoiseConfig, opts: &ZneOptions) -> QResult<ZneReport> {
    check_conformant(circuit, device)?;
    if opts.reps == 0 {
        return Err(QError::InvalidSeries("reps must be at least 1".into()));
    }
    if opts.shots == 0 {
        return Err(QError::ZeroShots);
    }
    ExtrapolationSeries::from_values(&opts.rs, &vec![0.0; opts.rs.len()])?;

    let calibration = if opts.use_filter {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(CALIBRATION_STREAM);
        Some(build_calibration(circuit.n, |c, s| sample_noisy(c, device, noise, s, &mut rng), opts.calibration_shots)?)
    } else {
        None
    };

    let jobs: Vec<(usize, usize)> = (0..opts.rs.len()).flat_map(|i| (0..opts.reps).map(move |k| (i, k))).collect();
    let values = jobs
        .par_iter()
        .map(|&(i, k)| {
            let mut rng = job_rng(opts.seed, i, k);
            run_repetition(circuit, device, noise, opts.rs[i], opts.shots, opts.twirl, calibration.as_ref(), &mut rng)
        })
        .collect::<QResult<Vec<f64>>>()?;

    let nodes: Vec<NodeEstimate> = opts
        .rs
        .iter()
        .zip(values.chunks(opts.reps))
        .map(|(&r, vals)| {
            let (mean, stderr) = mean_stderr(vals);
            NodeEstimate { r, mean, stderr, values: vals.to_vec() }
        })
        .collect();
    let mut report = ZneReport { nodes, coefficients: vec![], extrapolated: 0.0, extrapolated_stderr: 0.0, calibration };
    let series = report.series()?;
    report.coefficients = series.coefficients()?;
    report.extrapolated = series.extrapolate()?;
    report.extrapolated_stderr = series.extrapolated_stderr()?.unwrap_or(0.0);
    Ok(report)
}

/// Local maxima of a fixed-width histogram over `[lo, hi)` holding at least `min_count`
/// values, returned as bin centres. Plateaus count once, at their left edge.
pub fn histogram_modes(values: &[f64], lo: f64, hi: f64, width: f64, min_count: usize) -> Vec<f64> {
    let bins = ((hi - lo) / width).ceil() as usize;
    let mut h = vec![0usize; bins];
    for &v in values {
        if v >= lo && v < hi {
            h[(((v - lo) / width) as usize).min(bins - 1)] += 1;
        }
    }
    let mut modes = Vec::new();
    let mut i = 0;
    while i < bins {
        let mut j = i;
        while j + 1 < bins && h[j + 1] == h[i] {
            j += 1;
        }
        let left = if i == 0 { 0 } else { h[i - 1] };
        let right = if j + 1 == bins { 0 } else { h[j + 1] };
        if h[i] >= min_count && h[i] > left && h[i] > right {
            modes.push(lo + (i as f64 + 0.5) * width);
        }
        i = j + 1;
    }
    modes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::reference_hand_circuit;
    use crate::transpiler::transpile;

    fn reference_on(device: &DeviceModel) -> Circuit {
        transpile(&reference_hand_circuit(), device).unwrap().circuit
    }

    #[test]
    fn zero_noise_gives_ideal_everywhere() {
        let device = DeviceModel::qx2().noiseless();
        let c = reference_on(&device);
        let opts = ZneOptions { rs: vec![1.0, 2.0, 4.0], reps: 8, shots: 256, ..Default::default() };
        let report = zne_pipeline(&c, &device, &NoiseConfig::from_device(&device), &opts).unwrap();
        for node in &report.nodes {
            assert_eq!(node.values.len(), 8);
            assert!((node.mean - 4.0).abs() < 0.1, "r = {}: {}", node.r, node.mean);
        }
        assert!((report.extrapolated - 4.0).abs() < 0.3, "{}", report.extrapolated);
    }

    #[test]
    fn deterministic_under_seed() {
        let device = DeviceModel::qx2();
        let c = reference_on(&device);
        let noise = NoiseConfig::from_device(&device);
        let opts = ZneOptions { rs: vec![1.0, 2.0], reps: 6, shots: 128, seed: 5, ..Default::default() };
        let a = zne_pipeline(&c, &device, &noise, &opts).unwrap();
        let b = zne_pipeline(&c, &device, &noise, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_options() {
        let device = DeviceModel::qx2();
        let c = reference_on(&device);
        let noise = NoiseConfig::from_device(&device);
        let bad = ZneOptions { rs: vec![2.0, 4.0], reps: 2, shots: 8, ..Default::default() };
        assert!(zne_pipeline(&c, &device, &noise, &bad).is_err());
        let bad = ZneOptions { reps: 0, ..Default::default() };
        assert!(zne_pipeline(&c, &device, &noise, &bad).is_err());
    }

    #[test]
    fn mean_and_stderr() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(mean_stderr(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn histogram_modes_examples() {
        let mut v = vec![1.05; 10];
        v.extend(vec![2.05; 6]);
        v.extend(vec![1.55; 2]);
        let modes = histogram_modes(&v, 0.0, 5.0, 0.1, 3);
        assert_eq!(modes.len(), 2);
        assert!((modes[0] - 1.05).abs() < 1e-9 && (modes[1] - 2.05).abs() < 1e-9);
        assert!(histogram_modes(&[1.0; 5], 0.0, 5.0, 0.1, 10).is_empty());
    }
}
