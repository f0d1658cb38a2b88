use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

/// Electron delocalization measures over nonorthogonal AO determinants.
#[derive(Debug, Parser)]
#[command(name = "deloc", version, about)]
pub struct Cli {
    /// TOML file with defaults for normalization, threads and tolerances; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for Hamiltonian and Gram-matrix construction.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Raise log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full-CI ground state of an FCIDUMP Hamiltonian; writes an MO-basis CI vector.
    Solve(SolveArgs),
    /// Both l1 measures of an MO-basis state (given, or solved from an FCIDUMP).
    Measure(MeasureArgs),
    /// Writes overlap.json, mo.json and FCIDUMP for a ring model described in TOML.
    Model(ModelArgs),
    /// Model or FCIDUMP, solve and measure in one run.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct ElectronArgs {
    /// Override the alpha count implied by NELEC/MS2.
    #[arg(long)]
    pub n_alpha: Option<usize>,
    /// Override the beta count implied by NELEC/MS2.
    #[arg(long)]
    pub n_beta: Option<usize>,
    /// Refuse determinant spaces larger than this.
    #[arg(long)]
    pub max_determinants: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MeasureFlags {
    /// Rescale AO determinants to unit norm (default).
    #[arg(long, overrides_with = "no_normalize")]
    pub normalize: bool,
    /// Use raw products of normalized AOs.
    #[arg(long)]
    pub no_normalize: bool,
    /// Accepted |tr(ρS) − 1|.
    #[arg(long, value_name = "TOL")]
    pub trace_tol: Option<f64>,
}

impl MeasureFlags {
    pub fn normalize(&self) -> Option<bool> {
        match (self.normalize, self.no_normalize) {
            (_, true) => Some(false),
            (true, false) => Some(true),
            (false, false) => None,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub fcidump: PathBuf,
    #[command(flatten)]
    pub electrons: ElectronArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// AO overlap matrix (JSON).
    #[arg(long)]
    pub overlap: PathBuf,
    /// MO coefficients, rows AOs and columns MOs (JSON).
    #[arg(long)]
    pub mo: PathBuf,
    /// MO-basis CI vector (JSON).
    #[arg(long, required_unless_present = "fcidump", conflicts_with = "fcidump")]
    pub civector: Option<PathBuf>,
    /// Solve this Hamiltonian instead of reading a CI vector.
    #[arg(long)]
    pub fcidump: Option<PathBuf>,
    #[command(flatten)]
    pub electrons: ElectronArgs,
    #[command(flatten)]
    pub flags: MeasureFlags,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Ring model description (TOML).
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Ring model description (TOML).
    #[arg(long, conflicts_with_all = ["fcidump", "overlap", "mo"], required_unless_present = "fcidump")]
    pub spec: Option<PathBuf>,
    #[arg(long, requires_all = ["overlap", "mo"])]
    pub fcidump: Option<PathBuf>,
    #[arg(long)]
    pub overlap: Option<PathBuf>,
    #[arg(long)]
    pub mo: Option<PathBuf>,
    #[command(flatten)]
    pub electrons: ElectronArgs,
    #[command(flatten)]
    pub flags: MeasureFlags,
    #[arg(long)]
    pub out: PathBuf,
}
