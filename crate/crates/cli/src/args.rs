use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "noisy-grover",
    version,
    about,
    after_help = "Exit codes: 0 success, 1 usage or I/O error, 2 numerical invariant violation."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the closed-form and Hamiltonian-derived Kraus pairs and compare them.
    Kraus(KrausArgs),
    /// Tabulate the magic noise strengths chi_n and psi(chi_n).
    ChiStar(ChiStarArgs),
    /// Run one noisy search trajectory from the uniform state.
    Search(SearchArgs),
    /// Run trajectories over a chi x n grid.
    Sweep(SweepArgs),
    /// Run the invariant suite and emit the discrepancy ledger as JSON.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct KrausArgs {
    /// Noise strength chi >= 0.
    #[arg(long, allow_negative_numbers = true)]
    pub chi: f64,
}

#[derive(Debug, Args)]
pub struct ChiStarArgs {
    /// Largest n to tabulate (>= 1).
    #[arg(long)]
    pub n_max: u32,
    /// Debug: shift every chi_n by this amount before evaluating psi.
    #[arg(long, allow_negative_numbers = true)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Noise strength chi >= 0 (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// Database size N >= 2 (default 64).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of iterations (default ceil(4 sqrt N)).
    #[arg(long, visible_alias = "m-max")]
    pub m: Option<usize>,
    /// Target index (default 0).
    #[arg(long)]
    pub w: Option<usize>,
    /// Output file; defaults to $NOISY_GROVER_OUT_DIR/<name> or stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Use the negative psi branch for V0.
    #[arg(long)]
    pub flip_psi: bool,
    /// Report the final entropy in bits on stderr.
    #[arg(long)]
    pub bits: bool,
    /// key = value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated chi values.
    #[arg(long)]
    pub chi: Option<String>,
    /// chi grid as start:stop:step (inclusive of stop when it lands on the grid).
    #[arg(long)]
    pub chi_range: Option<String>,
    /// Comma-separated database sizes.
    #[arg(long)]
    pub n: Option<String>,
    /// Iterations per cell (default ceil(4 sqrt N)).
    #[arg(long, visible_alias = "m-max")]
    pub m: Option<usize>,
    /// Target index (default 0).
    #[arg(long)]
    pub w: Option<usize>,
    /// Output file, or directory with --per-cell.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write one file per (chi, n) cell into the --out directory.
    #[arg(long)]
    pub per_cell: bool,
    /// Use the negative psi branch for V0.
    #[arg(long)]
    pub flip_psi: bool,
    /// key = value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Treat the printed closed forms as authoritative: any discrepancy above 1e-8 fails.
    #[arg(long)]
    pub strict_paper: bool,
    /// Seed for the random chi grid and the composition pairs.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of random chi values in the completeness grid.
    #[arg(long, default_value_t = 100)]
    pub random_chi: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
