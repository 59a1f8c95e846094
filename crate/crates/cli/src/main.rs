//! `ncmoment`: graph and correlation bounds from the command line.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ncmoment", version, about = "Tracial moment hierarchies for graphs and correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound a graph parameter at level r.
    GraphBound(GraphBoundArgs),
    /// Lower-bound the entanglement dimension of a correlation.
    CorrBound(CorrBoundArgs),
    /// Generate a random correlation from a quantum model.
    Gen(GenArgs),
    /// Decide membership in the local polytope (exit 0 classical, 2 not).
    CheckClassical(CheckArgs),
    /// Synchronous Gram matrix or realization from a factorization.
    Sync(SyncArgs),
    /// Solve an SDPA sparse file with the embedded solver.
    SolveSdpa(SolveSdpaArgs),
}

#[derive(Args, Debug)]
pub struct GraphBoundArgs {
    /// theta, theta-plus, xi-sdp, xi-col, xi-stab, gamma-col, gamma-stab,
    /// las-col, las-stab or lambda.
    #[arg(long)]
    pub param: String,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    /// Graph as JSON {"n", "edges"} or DIMACS.
    #[arg(long)]
    pub input: PathBuf,
    /// Extra inequalities for xi-col.
    #[arg(long, value_enum, default_value_t = StrengthenArg::None)]
    pub strengthen: StrengthenArg,
    /// Compare direct γ values with the product-graph searches and the ξ
    /// bounds.
    #[arg(long)]
    pub cross_check: bool,
    /// Assert vertex transitivity and check ξ_stab · ξ_col = |V|.
    #[arg(long)]
    pub vertex_transitive: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrengthenArg {
    None,
    ThetaPlus,
    XiSdp,
}

#[derive(Args, Debug)]
pub struct CorrBoundArgs {
    #[arg(long, default_value_t = 2)]
    pub level: usize,
    /// Correlation JSON {"A","B","S","T","P"[a][b][s][t]}.
    #[arg(long)]
    pub input: PathBuf,
    /// Also write the reduced SDP in SDPA sparse format.
    #[arg(long)]
    pub export_sdpa: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Random pure state and POVMs on C^d ⊗ C^d.
    Tensor,
    /// Projective measurements on C^d with the maximally entangled state
    /// (a synchronous correlation).
    Projector,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long)]
    pub dim: usize,
    /// nA,nB,nS,nT
    #[arg(long)]
    pub scenario: String,
    #[arg(long)]
    pub seed: u64,
    /// Correlation JSON output.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub realization_out: Option<PathBuf>,
    /// Projector model only: the projector family as factor JSON.
    #[arg(long)]
    pub factors_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SyncArgs {
    /// M_P of a synchronous correlation, or of a realization (with factors).
    #[arg(long, conflicts_with = "realize", required_unless_present = "realize")]
    pub gram: bool,
    /// Realization from a factor JSON family {X_s^a}.
    #[arg(long)]
    pub realize: bool,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// With --gram on a realization: write the factors {X_s^a}.
    #[arg(long)]
    pub factors_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveSdpaArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let echo = argv[1..].to_vec();
    let outcome = match cli.command {
        Command::GraphBound(a) => commands::graph_bound(echo, &a),
        Command::CorrBound(a) => commands::corr_bound(echo, &a),
        Command::Gen(a) => commands::gen(echo, &a),
        Command::CheckClassical(a) => commands::check_classical(echo, &a),
        Command::Sync(a) => commands::sync(echo, &a),
        Command::SolveSdpa(a) => commands::solve_sdpa(echo, &a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
