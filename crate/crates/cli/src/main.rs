use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qpoker_cli::commands::{
    calibrate_cmd, filter_cmd, play_bot_cmd, simulate_cmd, transpile_cmd, zne_cmd, ZneOverrides, FULL_SHOTS,
};
use qpoker_cli::CliResult;

#[derive(Parser)]
#[command(name = "qpoker", version, about = "Simulate, transpile and error-mitigate quantum poker circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a circuit and write its histogram.
    Simulate {
        /// `reference` or a circuit JSON file.
        #[arg(long, default_value = "reference")]
        circuit: String,
        #[arg(long, default_value_t = 8192)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run with this device's noise after transpiling.
        #[arg(long)]
        device: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        paper_scale: bool,
    },
    /// Route a circuit onto a device.
    Transpile {
        #[arg(long, default_value = "reference")]
        circuit: String,
        #[arg(long)]
        device: String,
        /// Plain greedy routing from the identity layout.
        #[arg(long)]
        greedy: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero-noise extrapolation from an experiment config.
    Zne {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        device: Option<String>,
        /// 1024 repetitions of 8192 shots.
        #[arg(long)]
        paper_scale: bool,
        #[arg(long, default_value = "zne-out")]
        out: PathBuf,
    },
    /// Measure a device's readout calibration matrix.
    Calibrate {
        #[arg(long)]
        device: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 8192)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "calibration.csv")]
        out: PathBuf,
    },
    /// Apply a readout filter to a histogram.
    Filter {
        #[arg(long)]
        calibration: PathBuf,
        #[arg(long)]
        counts: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play hands between random bots.
    PlayBot {
        #[arg(long, default_value_t = 100)]
        hands: usize,
        #[arg(long, default_value_t = 3)]
        players: usize,
        #[arg(long, default_value_t = 100)]
        stack: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Game config JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "bot-out")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { circuit, shots, seed, device, out, paper_scale } => {
            let shots = if paper_scale { FULL_SHOTS } else { shots };
            simulate_cmd(&circuit, device.as_deref(), shots, seed, out.as_deref()).map(drop)
        }
        Command::Transpile { circuit, device, greedy, out } => transpile_cmd(&circuit, &device, greedy, out.as_deref()).map(drop),
        Command::Zne { config, reps, shots, seed, device, paper_scale, out } => {
            zne_cmd(&config, &ZneOverrides { reps, shots, seed, device, full_scale: paper_scale }, &out).map(drop)
        }
        Command::Calibrate { device, n, shots, seed, out } => calibrate_cmd(&device, n, shots, seed, &out).map(drop),
        Command::Filter { calibration, counts, out } => filter_cmd(&calibration, &counts, out.as_deref()).map(drop),
        Command::PlayBot { hands, players, stack, seed, config, out } => {
            play_bot_cmd(hands, players, stack, seed, config.as_deref(), &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
