//! Command-line arguments. Every parameter is optional here so that values
//! from a config file can fill the gaps; defaults are applied last.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::reduced::{FamilyKind, Ramp};
use crate::spectral::GapRoute;

#[derive(Debug, Parser)]
#[command(name = "clockforge", version, about = "Clock-Hamiltonian gap and adiabatic-evolution experiments")]
pub struct Cli {
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML config file; command-line flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also write a gnuplot script next to the data.
    #[arg(long, global = true)]
    pub gnuplot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two lowest levels along the naive, stage-1 or stage-3 interpolation.
    GapScan(GapScanArgs),
    /// Fit of ln(min gap) against L for the naive path.
    Scaling(ScalingArgs),
    /// Time evolution through the three-stage or naive schedule.
    Evolve(EvolveArgs),
    /// Cross-check full clock-space operators against the reduced model.
    Verify(VerifyArgs),
    /// Dump the analytic problem ground state and the continuum well state.
    GroundState(GroundStateArgs),
}

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapScanArgs {
    #[arg(long)]
    pub family: Option<FamilyKind>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    /// Grid points on [0, 1].
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingArgs {
    #[arg(long)]
    pub eta: Option<f64>,
    /// Comma-separated chain lengths.
    #[arg(long = "L", value_delimiter = ',')]
    #[serde(rename = "L")]
    pub l: Option<Vec<usize>>,
    #[arg(long)]
    pub mode: Option<GapRoute>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EvolveMode {
    #[default]
    ThreeStage,
    Naive,
}

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveArgs {
    #[arg(long, value_enum)]
    pub mode: Option<EvolveMode>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[arg(long = "T1")]
    #[serde(rename = "T1")]
    pub t1: Option<f64>,
    #[arg(long = "T3")]
    #[serde(rename = "T3")]
    pub t3: Option<f64>,
    /// Total time of the naive schedule.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub ramp: Option<Ramp>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Run the moving well alone and compare with the continuum reference.
    #[arg(long)]
    #[serde(default)]
    pub error_study: bool,
    /// Initial overlap with the ground state of H_I(0) for the error study.
    #[arg(long)]
    pub initial_overlap: Option<f64>,
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Report wall-clock runtime in the JSON summary.
    #[arg(long)]
    #[serde(default)]
    pub timing: bool,
}

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Circuit file to check.
    pub circuit: Option<PathBuf>,
    /// Check this many random circuits instead.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Qubits per random circuit.
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Gates per random circuit.
    #[arg(long)]
    pub gates: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStateArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub spacing: Option<f64>,
}

/// Layout of the `--config` file: optional top-level output settings plus
/// one table per subcommand.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub out: Option<PathBuf>,
    pub gnuplot: Option<bool>,
    #[serde(default, rename = "gap-scan")]
    pub gap_scan: GapScanArgs,
    #[serde(default)]
    pub scaling: ScalingArgs,
    #[serde(default)]
    pub evolve: EvolveArgs,
    #[serde(default)]
    pub verify: VerifyArgs,
    #[serde(default, rename = "ground-state")]
    pub ground_state: GroundStateArgs,
}

macro_rules! overlay {
    ($flags:expr, $file:expr; $($field:ident),*) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field.clone(); } )*
    };
}

impl GapScanArgs {
    pub fn merge(mut self, file: &GapScanArgs) -> Self {
        overlay!(self, file; family, eta, l, points);
        self
    }
}

impl ScalingArgs {
    pub fn merge(mut self, file: &ScalingArgs) -> Self {
        overlay!(self, file; eta, l, mode);
        self
    }
}

impl EvolveArgs {
    pub fn merge(mut self, file: &EvolveArgs) -> Self {
        overlay!(self, file; mode, eta, tau, l, t1, t3, t, ramp, dt, initial_overlap, half_width, spacing);
        self.error_study |= file.error_study;
        self.timing |= file.timing;
        self
    }
}

impl VerifyArgs {
    pub fn merge(mut self, file: &VerifyArgs) -> Self {
        overlay!(self, file; circuit, random, seed, qubits, gates, eta, tau);
        self
    }
}

impl GroundStateArgs {
    pub fn merge(mut self, file: &GroundStateArgs) -> Self {
        overlay!(self, file; l, eta, half_width, spacing);
        self
    }
}
