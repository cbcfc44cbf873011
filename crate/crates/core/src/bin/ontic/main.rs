//! Command-line driver for simulating and certifying the ontological
//! models.
//!
//! Machine-readable output (JSON or CSV) goes to `--out` or stdout; human
//! summaries go to stderr. Exit codes: 0 when every embedded check passed,
//! 1 when a check failed, 2 on usage or runtime errors.

mod cmd;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "ontic",
    version,
    about = "Simulate ontological models of projective quantum measurements and certify their statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample preparation/response trials and certify outcome frequencies
    /// against the Born rule, alongside exact response-mass accounting.
    VerifyBorn(VerifyBornArgs),
    /// Prepare a set of states and classify the model as psi-ontic or
    /// psi-epistemic, reporting a maximal-overlap witness pair.
    Witness(WitnessArgs),
    /// Tabulate the closed-form floor z against its numerical oracle.
    ZTable(ZTableArgs),
    /// Sweep sampled region states against random measurements and verify
    /// the region's forced outcome everywhere.
    RegionCheck(RegionCheckArgs),
    /// Estimate the support overlap of two preparations and compare against
    /// the exact symbolic value.
    Overlap(OverlapArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args)]
pub struct CommonArgs {
    /// Model: bell, qubit-hemisphere, general-cap, or basis-cap.
    #[arg(long, default_value = "bell")]
    pub model: String,
    /// Hilbert-space dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Base seed; every random draw in a run flows from it.
    #[arg(long, env = "ONTIC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (all available when omitted). Results do not depend
    /// on this.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write machine-readable output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Machine-readable output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args)]
pub struct VerifyBornArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Trials per run.
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    /// Number of independent (state, measurement) runs.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    /// Prepared state: random, anchor, cap, or a JSON file path.
    #[arg(long, default_value = "random")]
    pub state: String,
}

#[derive(Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of states to prepare and compare pairwise.
    #[arg(long, default_value_t = 16)]
    pub states: usize,
    /// Draw half of the states from inside the model's cap regions.
    #[arg(long)]
    pub bias_cap: bool,
    /// Overlap above which the set counts as psi-epistemic.
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
}

#[derive(Args)]
pub struct ZTableArgs {
    /// Common flags; --model is ignored here (the floor depends only on
    /// fidelity and dimension).
    #[command(flatten)]
    pub common: CommonArgs,
    /// Fidelity grid points per dimension.
    #[arg(long, default_value_t = 64)]
    pub n: u64,
    /// Oracle search budget per grid point.
    #[arg(long, default_value_t = 4096)]
    pub budget: usize,
    /// Tabulate a single dimension instead of the 2..=8 sweep.
    #[arg(long)]
    pub only_d: bool,
}

#[derive(Args)]
pub struct RegionCheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Region states to sample (split across the model's regions).
    #[arg(long, default_value_t = 1_000)]
    pub n: u64,
    /// Random measurements to sweep each state against.
    #[arg(long, default_value_t = 1_000)]
    pub measurements: u64,
    /// Deliberately flip one response to demonstrate failure reporting.
    #[arg(long)]
    pub inject_failure: bool,
}

#[derive(Args)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Monte Carlo samples per direction.
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    /// First state: random, anchor, cap, or a JSON file path.
    #[arg(long, default_value = "cap")]
    pub state_a: String,
    /// Second state: random, anchor, cap, or a JSON file path.
    #[arg(long, default_value = "cap")]
    pub state_b: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::VerifyBorn(args) => util::with_workers(args.common.workers, || cmd::verify_born(&args)),
        Command::Witness(args) => util::with_workers(args.common.workers, || cmd::witness(&args)),
        Command::ZTable(args) => util::with_workers(args.common.workers, || cmd::z_table(&args)),
        Command::RegionCheck(args) => util::with_workers(args.common.workers, || cmd::region_check(&args)),
        Command::Overlap(args) => util::with_workers(args.common.workers, || cmd::overlap(&args)),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
