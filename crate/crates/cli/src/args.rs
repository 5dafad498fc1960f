//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::parse::{parse_angle, parse_grid, Grid};

#[derive(Debug, Parser)]
#[command(name = "dqc1-lpn", version, about = "One-clean-qubit parity learning experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover a hidden string bit by bit.
    Learn(LearnArgs),
    /// Normalized traces of the probing block for every step.
    TraceTable(TraceTableArgs),
    /// Probe/data discord of the probing circuit over a polarization or angle grid.
    DiscordSweep(DiscordArgs),
    /// Noise experiments on the probing circuit.
    NoiseSweep(NoiseArgs),
    /// Coherence consumed per run over polarization and trace grids.
    Coherence(CoherenceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Root seed for every random stream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Record elapsed wall time; output is then no longer reproducible byte for byte.
    #[arg(long)]
    #[serde(skip)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnBackend {
    /// Full density-matrix simulation, exact readout.
    Dense,
    /// Product-trace evaluation, exact readout.
    Closed,
    /// Product-trace evaluation with finite-ensemble shot noise.
    Sampled,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct LearnArgs {
    /// Number of data qubits; inferred from --s when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    /// Hidden string, most significant data qubit first.
    #[arg(long, conflicts_with = "random_s")]
    pub s: Option<String>,
    /// Draw the hidden string from the seed.
    #[arg(long)]
    pub random_s: bool,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Probe depolarizing rate before readout.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub theta: f64,
    /// Ensemble size per query.
    #[arg(long = "L", default_value_t = 1000.0)]
    #[serde(rename = "L")]
    pub ensemble: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Accuracy cap per step.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Spend the full failure probability on every bit.
    #[arg(long)]
    pub per_bit_delta: bool,
    /// Abort with exit code 3 when a step needs more queries.
    #[arg(long)]
    pub max_queries: Option<u64>,
    /// Fixed query count per step.
    #[arg(long)]
    pub queries: Option<u64>,
    #[arg(long, value_enum, default_value_t = LearnBackend::Closed)]
    pub backend: LearnBackend,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct TraceTableArgs {
    /// Number of data qubits; all strings are tabulated when --s is absent (n <= 8).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub theta: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DiscordArgs {
    #[arg(long)]
    pub s: String,
    /// Probed data qubit, 1-based.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Rotation angle for the polarization sweep.
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub theta: f64,
    #[arg(long, default_value = "0:1:11", value_parser = parse_grid)]
    pub alpha_grid: Grid,
    /// Sweep the angle instead, emitting the discord contrast between both values of bit j.
    #[arg(long, value_parser = parse_grid)]
    pub theta_grid: Option<Grid>,
    /// Polarization for the angle sweep.
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Depolarizing between the two controlled blocks.
    Midq,
    /// Deterministic phase flips between the two controlled blocks.
    Parity,
    /// Tilted rotation axis and angle offsets.
    Systematic,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct NoiseArgs {
    #[arg(long, value_enum)]
    pub mode: NoiseMode,
    #[arg(long)]
    pub s: String,
    /// Probed data qubit, 1-based; defaults to the last one.
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub theta: f64,
    /// Mid-circuit depolarizing rates (midq).
    #[arg(long, default_value = "0:0.05:6", value_parser = parse_grid)]
    pub q_grid: Grid,
    /// Flip sets (parity): `;`-separated lists of 1-based qubits, `none` for the empty set.
    /// Every subset is run when absent.
    #[arg(long)]
    pub flips: Option<String>,
    /// Axis tilts (systematic).
    #[arg(long, default_value = "0:pi/2:5", value_parser = parse_grid)]
    pub phi_grid: Grid,
    /// Rotation angles (systematic).
    #[arg(long, default_value = "0.3:2.2:5", value_parser = parse_grid)]
    pub theta_grid: Grid,
    /// Angle offset added to every rotation (systematic).
    #[arg(long, default_value = "0", value_parser = parse_angle)]
    pub theta_error: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CoherenceArgs {
    #[arg(long, default_value = "0:1:11", value_parser = parse_grid)]
    pub alpha_grid: Grid,
    #[arg(long, default_value = "0:1:11", value_parser = parse_grid)]
    pub tau_grid: Grid,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}
