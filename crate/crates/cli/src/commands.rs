use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use qpoker_core::mitigation::filter::{apply_filter, build_calibration, CalibrationMatrix};
use qpoker_core::mitigation::pipeline::{zne_pipeline, ZneOptions, ZneReport, DEFAULT_RS};
use qpoker_core::noisesim::sample_noisy;
use qpoker_core::qcore::observable::expectation_ones;
use qpoker_core::qcore::sample::{bitstring, parse_bitstring, sample};
use qpoker_core::qcore::state::simulate;
use qpoker_core::transpiler::{check_coupling, equivalence_fidelity, route, transpile, TranspileResult};
use qpoker_core::{Circuit, Counts, DeviceModel};
use qpoker_game::bot::play_random_hand;
use qpoker_game::log::to_jsonl;
use qpoker_game::{GameConfig, GameState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::inputs::{load_circuit, load_device_spec, read_text, NoiseSpec};
use crate::output::{config_hash, emit, fmt_f, write_file, Csv};

pub const FULL_REPS: usize = 1024;
pub const FULL_SHOTS: u64 = 8192;
pub const EQUIVALENCE_TOL: f64 = 1e-9;

fn nonzero_shots(shots: u64) -> CliResult<u64> {
    if shots == 0 {
        return Err(CliError::invalid("--shots must be at least 1"));
    }
    Ok(shots)
}

#[derive(Serialize)]
struct SimulateConfig<'a> {
    circuit: &'a Circuit,
    device: Option<&'a DeviceModel>,
    shots: u64,
    seed: u64,
}

/// Histogram of `circuit`, noiselessly or on `device` after transpiling.
pub fn simulate_cmd(circuit: &str, device: Option<&str>, shots: u64, seed: u64, out: Option<&Path>) -> CliResult<f64> {
    let shots = nonzero_shots(shots)?;
    let circuit = load_circuit(circuit, None)?;
    let device = device.map(|d| load_device_spec(d, None)).transpose()?;
    let hash = config_hash(&SimulateConfig { circuit: &circuit, device: device.as_ref(), shots, seed });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = match &device {
        None => sample(&simulate::<f64>(&circuit)?, shots, &mut rng)?,
        Some(d) => {
            let t = transpile(&circuit, d)?;
            let noise = NoiseSpec::default().build(d)?;
            let physical = sample_noisy(&t.circuit, d, &noise, shots, &mut rng)?;
            logical_counts(&physical, &t, circuit.n)?
        }
    };
    let expectation = counts.expectation_ones()?;
    let mut csv = Csv::new("simulate", &hash, &["bitstring", "count", "probability"]);
    csv.comment(format!("circuit: {}", circuit.name.as_deref().unwrap_or("unnamed")))
        .comment(format!("device: {}", device.as_ref().map_or("none", |d| d.name.as_str())))
        .comment(format!("shots: {shots}"))
        .comment(format!("seed: {seed}"))
        .comment(format!("expectation: {}", fmt_f(expectation)));
    for (i, (&c, p)) in counts.as_slice().iter().zip(counts.probabilities()).enumerate() {
        csv.row([bitstring(i, counts.num_qubits()), c.to_string(), fmt_f(p)]);
    }
    emit(out, &csv.into_bytes())?;
    if out.is_some() {
        println!("expectation: {}", fmt_f(expectation));
    }
    Ok(expectation)
}

/// Physical counts read back in logical qubit order, restricted to the logical register.
fn logical_counts(physical: &Counts, t: &TranspileResult, n: usize) -> CliResult<Counts> {
    let mut out = vec![0u64; 1 << n];
    for (p, &c) in physical.as_slice().iter().enumerate() {
        out[t.logical_index(p) & ((1 << n) - 1)] += c;
    }
    Ok(Counts::from_vec(out)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranspileSummary {
    pub device: String,
    pub cx_count: usize,
    pub depth: usize,
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
    pub fidelity: f64,
    pub equivalent: bool,
}

/// Routes a circuit onto a device and checks the result.
pub fn transpile_cmd(circuit: &str, device: &str, greedy: bool, out: Option<&Path>) -> CliResult<TranspileSummary> {
    let logical = load_circuit(circuit, None)?;
    let device = load_device_spec(device, None)?;
    let t = if greedy { route(&logical, &device)? } else { transpile(&logical, &device)? };
    check_coupling(&t.circuit, &device).map_err(|e| CliError::runtime(format!("router produced {e}")))?;
    let fidelity = equivalence_fidelity(&logical, &t)?;
    let summary = TranspileSummary {
        device: device.name.clone(),
        cx_count: t.stats.cx_count,
        depth: t.stats.depth,
        initial_layout: t.initial_layout.as_slice().to_vec(),
        final_layout: t.final_layout.as_slice().to_vec(),
        fidelity,
        equivalent: 1.0 - fidelity <= EQUIVALENCE_TOL,
    };
    println!("device: {}", summary.device);
    println!("cx: {} depth: {}", summary.cx_count, summary.depth);
    println!("layout: {:?} -> {:?}", summary.initial_layout, summary.final_layout);
    println!("equivalence: {} (fidelity {})", if summary.equivalent { "PASS" } else { "FAIL" }, fmt_f(fidelity));
    if let Some(p) = out {
        write_file(p, t.circuit.to_json().as_bytes())?;
    }
    if !summary.equivalent {
        return Err(CliError::runtime("transpiled circuit is not equivalent to the input"));
    }
    Ok(summary)
}

/// A ZNE experiment as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `reference` or a circuit path, relative to the config file.
    pub circuit: String,
    pub device: String,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default = "default_rs")]
    pub rs: Vec<f64>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub use_filter: bool,
    #[serde(default = "default_true")]
    pub twirl: bool,
    /// Route the circuit onto the device first.
    #[serde(default = "default_true")]
    pub transpile: bool,
}

fn default_rs() -> Vec<f64> {
    DEFAULT_RS.to_vec()
}

fn default_reps() -> usize {
    256
}

fn default_shots() -> u64 {
    1024
}

fn default_true() -> bool {
    true
}

/// What `zne` writes next to its CSVs; feeding it back as `--config` reruns the experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub extrapolated: f64,
    pub extrapolated_stderr: f64,
    pub summary: Vec<(f64, f64, f64)>,
    pub wall_clock_seconds: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ZneOverrides {
    pub reps: Option<usize>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub device: Option<String>,
    pub full_scale: bool,
}

/// Reads an experiment config or a previous record, with relative paths made absolute.
pub fn load_experiment(path: &Path) -> CliResult<ExperimentConfig> {
    let text = read_text(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::invalid(e.to_string()))?;
    let value = if value.get("config_hash").is_some() { value["config"].clone() } else { value };
    let mut cfg: ExperimentConfig = serde_json::from_value(value).map_err(|e| CliError::invalid(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    for spec in [&mut cfg.circuit, &mut cfg.device] {
        let candidate = base.join(&*spec);
        if Path::new(spec.as_str()).is_relative() && candidate.is_file() {
            *spec = candidate.to_string_lossy().into_owned();
        }
    }
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn apply(&mut self, o: &ZneOverrides) {
        if o.full_scale {
            self.reps = FULL_REPS;
            self.shots = FULL_SHOTS;
        }
        if let Some(r) = o.reps {
            self.reps = r;
        }
        if let Some(s) = o.shots {
            self.shots = s;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.device {
            self.device = d.clone();
        }
    }

    /// Runs the experiment and returns the report with the circuit actually executed.
    pub fn run(&self) -> CliResult<(ZneReport, Circuit)> {
        nonzero_shots(self.shots)?;
        let logical = load_circuit(&self.circuit, None)?;
        let device = load_device_spec(&self.device, None)?;
        let noise = self.noise.build(&device)?;
        let circuit = if self.transpile { transpile(&logical, &device)?.circuit } else { logical };
        let opts = ZneOptions {
            rs: self.rs.clone(),
            reps: self.reps,
            shots: self.shots,
            seed: self.seed,
            use_filter: self.use_filter,
            twirl: self.twirl,
            ..ZneOptions::default()
        };
        Ok((zne_pipeline(&circuit, &device, &noise, &opts)?, circuit))
    }
}

fn node_label(r: f64) -> String {
    format!("E_{r}")
}

/// Runs a ZNE experiment and writes `results.csv`, `summary.csv`, `report.csv` and `record.json`.
pub fn zne_cmd(config: &Path, overrides: &ZneOverrides, out: &Path) -> CliResult<ZneReport> {
    let mut cfg = load_experiment(config)?;
    cfg.apply(overrides);
    let hash = config_hash(&cfg);
    let start = Instant::now();
    let (report, _) = cfg.run()?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut results = Csv::new("zne", &hash, &["r", "rep", "expectation"]);
    results.comment(format!("seed: {}", cfg.seed)).comment(format!("reps: {} shots: {}", cfg.reps, cfg.shots));
    for node in &report.nodes {
        for (k, v) in node.values.iter().enumerate() {
            results.row([fmt_f(node.r), k.to_string(), fmt_f(*v)]);
        }
    }
    let mut summary = Csv::new("zne", &hash, &["r", "mean", "stderr"]);
    for node in &report.nodes {
        summary.row([fmt_f(node.r), fmt_f(node.mean), fmt_f(node.stderr)]);
    }
    let labels: Vec<String> = report.nodes.iter().map(|n| node_label(n.r)).collect();
    let extrapolated_label = format!("R({})", labels.join(","));
    let mut rep = Csv::new("zne", &hash, &["label", "value", "stderr", "coefficient"]);
    for ((node, label), c) in report.nodes.iter().zip(&labels).zip(&report.coefficients) {
        rep.row([label.clone(), fmt_f(node.mean), fmt_f(node.stderr), fmt_f(*c)]);
    }
    rep.row([extrapolated_label.clone(), fmt_f(report.extrapolated), fmt_f(report.extrapolated_stderr), String::new()]);

    write_file(&out.join("results.csv"), &results.into_bytes())?;
    write_file(&out.join("summary.csv"), &summary.into_bytes())?;
    write_file(&out.join("report.csv"), &rep.into_bytes())?;
    let record = ExperimentRecord {
        config: cfg,
        config_hash: hash,
        extrapolated: report.extrapolated,
        extrapolated_stderr: report.extrapolated_stderr,
        summary: report.nodes.iter().map(|n| (n.r, n.mean, n.stderr)).collect(),
        wall_clock_seconds: elapsed,
    };
    let json = serde_json::to_string_pretty(&record).expect("record serializes");
    write_file(&out.join("record.json"), json.as_bytes())?;

    for (node, label) in report.nodes.iter().zip(&labels) {
        println!("{label:>6} = {:.4} ± {:.4}", node.mean, node.stderr);
    }
    println!("{extrapolated_label} = {:.4} ± {:.4}", report.extrapolated, report.extrapolated_stderr);
    Ok(report)
}

#[derive(Serialize)]
struct CalibrateConfig<'a> {
    device: &'a DeviceModel,
    noise: &'a NoiseSpec,
    n: usize,
    shots: u64,
    seed: u64,
}

/// Measures the readout matrix of the first `n` qubits of a device.
pub fn calibrate_cmd(device: &str, n: Option<usize>, shots: u64, seed: u64, out: &Path) -> CliResult<CalibrationMatrix<f64>> {
    let shots = nonzero_shots(shots)?;
    let device = load_device_spec(device, None)?;
    let n = n.unwrap_or(device.num_qubits());
    if n == 0 || n > device.num_qubits() {
        return Err(CliError::invalid(format!("--n must be in 1..={}", device.num_qubits())));
    }
    let spec = NoiseSpec::default();
    let noise = spec.build(&device)?;
    let hash = config_hash(&CalibrateConfig { device: &device, noise: &spec, n, shots, seed });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = 0usize;
    let cal = build_calibration(
        n,
        |prep, s| {
            jobs += 1;
            let wide = prep.widened(device.num_qubits())?;
            let counts = sample_noisy(&wide, &device, &noise, s, &mut rng)?;
            let mut narrow = vec![0u64; 1 << n];
            for (i, &c) in counts.as_slice().iter().enumerate() {
                narrow[i & ((1 << n) - 1)] += c;
            }
            Counts::from_vec(narrow)
        },
        shots,
    )?;
    eprintln!("calibrated {n} qubits from {jobs} preparations");
    write_calibration(&cal, &hash, out)?;
    Ok(cal)
}

fn heatmap_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("calibration");
    out.with_file_name(format!("{stem}-heatmap.csv"))
}

/// Matrix CSV (rows observed, columns prepared) and a long-form heatmap next to it.
pub fn write_calibration(cal: &CalibrationMatrix<f64>, hash: &str, out: &Path) -> CliResult<()> {
    let n = cal.num_qubits();
    let dim = 1 << n;
    let labels: Vec<String> = (0..dim).map(|j| bitstring(j, n)).collect();
    let mut header = vec!["observed".to_string()];
    header.extend(labels.iter().cloned());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut matrix = Csv::new("calibrate", hash, &header_refs);
    matrix.comment("entry (i, j) = P(observe i | prepared j); columns sum to 1");
    let mut heat = Csv::new("calibrate", hash, &["observed", "prepared", "probability"]);
    for i in 0..dim {
        let mut row = vec![labels[i].clone()];
        for j in 0..dim {
            let p = cal.matrix()[(i, j)];
            row.push(fmt_f(p));
            heat.row([labels[i].clone(), labels[j].clone(), fmt_f(p)]);
        }
        matrix.row(row);
    }
    write_file(out, &matrix.into_bytes())?;
    write_file(&heatmap_path(out), &heat.into_bytes())
}

/// Reads a matrix written by [`write_calibration`].
pub fn read_calibration(path: &Path) -> CliResult<CalibrationMatrix<f64>> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let dim = rdr.headers()?.len().saturating_sub(1);
    let mut values = Vec::with_capacity(dim * dim);
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != dim + 1 {
            return Err(CliError::invalid(format!("{}: ragged calibration row", path.display())));
        }
        for f in rec.iter().skip(1) {
            values.push(f.parse::<f64>().map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?);
        }
    }
    if values.len() != dim * dim {
        return Err(CliError::invalid(format!("{}: calibration matrix is not square", path.display())));
    }
    Ok(CalibrationMatrix::new(DMatrix::from_row_slice(dim, dim, &values))?)
}

/// Reads the `bitstring,count` columns of a histogram CSV.
pub fn read_counts(path: &Path) -> CliResult<Counts> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let bits = rec.get(0).ok_or_else(|| CliError::invalid("missing bitstring column"))?;
        let count: u64 = rec
            .get(1)
            .ok_or_else(|| CliError::invalid("missing count column"))?
            .parse()
            .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
        entries.push((bits.len(), parse_bitstring(bits)?, count));
    }
    let n = entries.first().map(|e| e.0).ok_or_else(|| CliError::invalid(format!("{}: no counts", path.display())))?;
    let mut counts = vec![0u64; 1 << n];
    for (len, idx, c) in entries {
        if len != n {
            return Err(CliError::invalid("bit strings of different lengths"));
        }
        counts[idx] += c;
    }
    Ok(Counts::from_vec(counts)?)
}

/// Applies a readout filter to a histogram.
pub fn filter_cmd(calibration: &Path, counts: &Path, out: Option<&Path>) -> CliResult<Vec<f64>> {
    let cal = read_calibration(calibration)?;
    let counts = read_counts(counts)?;
    let raw = counts.probabilities();
    let filtered = apply_filter(&cal, &raw)?;
    let hash = config_hash(&(cal.matrix().as_slice(), counts.as_slice()));
    let mut csv = Csv::new("filter", &hash, &["bitstring", "raw", "filtered"]);
    csv.comment(format!("raw expectation: {}", fmt_f(expectation_ones(&raw)?)))
        .comment(format!("filtered expectation: {}", fmt_f(expectation_ones(&filtered)?)));
    for (i, (r, f)) in raw.iter().zip(&filtered).enumerate() {
        csv.row([bitstring(i, counts.num_qubits()), fmt_f(*r), fmt_f(*f)]);
    }
    emit(out, &csv.into_bytes())?;
    Ok(filtered)
}

#[derive(Serialize)]
struct PlayConfig<'a> {
    config: &'a GameConfig,
    hands: usize,
    players: usize,
    stack: u64,
    seed: u64,
}

/// Plays random-bot hands; writes per-seat results and the concatenated event logs.
pub fn play_bot_cmd(hands: usize, players: usize, stack: u64, seed: u64, config: Option<&Path>, out: &Path) -> CliResult<()> {
    let base: GameConfig = match config {
        Some(p) => serde_json::from_str(&read_text(p)?).map_err(|e| CliError::invalid(e.to_string()))?,
        None => GameConfig::default(),
    };
    if hands == 0 {
        return Err(CliError::invalid("--hands must be at least 1"));
    }
    base.validate(players)?;
    let hash = config_hash(&PlayConfig { config: &base, hands, players, stack, seed });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = Csv::new("play-bot", &hash, &["hand", "seat", "start", "end", "folded", "points", "bits"]);
    let mut log = String::new();
    for hand in 0..hands {
        let cfg = GameConfig { seed: seed.wrapping_add(hand as u64), ..base.clone() };
        let state = play_random_hand(GameState::new_hand(&cfg, &vec![stack; players], hand % players)?, &mut rng)?;
        let outcome = state.outcome.as_ref().expect("finished hand");
        for (seat, p) in state.players.iter().enumerate() {
            let score = outcome.scores.iter().find(|s| s.seat == seat);
            csv.row([
                hand.to_string(),
                seat.to_string(),
                stack.to_string(),
                p.stack.to_string(),
                p.folded.to_string(),
                score.map_or(String::new(), |s| s.points.to_string()),
                score.map_or(String::new(), |s| s.bits.clone()),
            ]);
        }
        log.push_str(&to_jsonl(&state.log));
    }
    write_file(&out.join("hands.csv"), &csv.into_bytes())?;
    write_file(&out.join("hands.jsonl"), log.as_bytes())?;
    println!("played {hands} hands");
    Ok(())
}
