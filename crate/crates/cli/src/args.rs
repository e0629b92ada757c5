use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use freesnake::analysis::{DEFAULT_OFFSET, DEFAULT_SAMPLES, DEFAULT_SPAN};
use freesnake::compare::StdConvention;
use freesnake::Units;

/// Gauge pressure the robots were actuated at; recorded as metadata only.
pub const DEFAULT_PRESSURE_KPA: f64 = 310.0;

#[derive(Debug, Parser)]
#[command(name = "freesnake", version, about = "FREE snake-robot design, simulation and curvature analysis")]
pub struct Cli {
    /// Directory for all outputs.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Actuation pressure annotation written to run metadata.
    #[arg(long = "pressure-kpa", global = true, default_value_t = DEFAULT_PRESSURE_KPA)]
    pub pressure_kpa: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve fiber angles for per-role target curvatures.
    Design(DesignArgs),
    /// Render an assembly to a trace CSV.
    Simulate(SimulateArgs),
    /// Curvature profiles from trace CSVs.
    Analyze(AnalyzeArgs),
    /// Group statistics, envelope coverage and duration summaries.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// JSON object with `head`, `mid`, `tail` curvatures in 1/m and optional
    /// `total_length_m` and `genus`.
    #[arg(long)]
    pub targets: PathBuf,

    /// Relaxed tube radius, meters.
    #[arg(long = "R0")]
    pub r0: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Assembly spec JSON.
    #[arg(long, conflicts_with = "genus", required_unless_present = "genus")]
    pub spec: Option<PathBuf>,

    /// Use a built-in genus template instead of a spec file.
    #[arg(long)]
    pub genus: Option<String>,

    /// Approximate number of raw points to render.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,

    /// Trial id written to the trace; defaults to the genus tag.
    #[arg(long = "trial-id")]
    pub trial_id: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    Px,
    M,
}

impl From<UnitArg> for Units {
    fn from(u: UnitArg) -> Units {
        match u {
            UnitArg::Px => Units::Pixels,
            UnitArg::M => Units::Meters,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub traces: PathBuf,

    /// Per-trial point correspondences for projective rectification.
    #[arg(long)]
    pub rectify: Option<PathBuf>,

    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub n: usize,

    #[arg(long, default_value_t = DEFAULT_SPAN)]
    pub span: usize,

    #[arg(long, default_value_t = DEFAULT_OFFSET)]
    pub offset: usize,

    #[arg(long, value_enum)]
    pub units: UnitArg,

    /// Run trials one at a time.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StdArg {
    Population,
    Sample,
}

impl From<StdArg> for StdConvention {
    fn from(s: StdArg) -> Self {
        match s {
            StdArg::Population => StdConvention::Population,
            StdArg::Sample => StdConvention::Sample,
        }
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// `label=profiles.csv`; repeat per group. Repeated labels merge.
    #[arg(long, required = true, num_args = 1..)]
    pub groups: Vec<String>,

    /// `[label=]durations.csv`; the label defaults to the file stem.
    #[arg(long, num_args = 1..)]
    pub durations: Vec<String>,

    #[arg(long, value_enum, default_value_t = StdArg::Population)]
    pub std: StdArg,

    /// Grid size profiles are interpolated onto when they differ.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub n: usize,
}
