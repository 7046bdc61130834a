mod commands;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact linear-optics simulation: heralded gates, C-SHIFT networks and the
/// qudit Bell-state analyzer.
///
/// Exit status is 0 when every checked invariant holds, 1 when one is
/// violated and 2 on usage or input errors.
#[derive(Parser, Debug)]
#[command(name = "linopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one heralded gate on an input state.
    Gate(GateArgs),
    /// Run the Bell-state analyzer on every generalized Bell state.
    Analyze(AnalyzeArgs),
    /// C-SHIFT swap networks.
    #[command(subcommand)]
    Network(NetworkCommand),
    /// Decompose a unitary into beam splitters and phase shifters.
    Decompose(DecomposeArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Ns,
    Csign,
    Cswap,
    Cshift,
}

#[derive(Args, Debug)]
pub struct GateArgs {
    #[arg(value_enum)]
    pub kind: GateKind,
    /// ideal, basic, teleported (with --n) or teleported:K. Ignored by `ns`.
    #[arg(long, default_value = "basic")]
    pub backend: String,
    /// Ancilla order of the teleported backend.
    #[arg(long)]
    pub n: Option<usize>,
    /// Qudit dimension for `cshift`.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// `OCC:RE[:IM]` terms separated by `;`, or `@PATH` to a state file.
    #[arg(long)]
    pub input: Option<String>,
    /// Bell input `M,N` for `cshift` instead of --input.
    #[arg(long, conflicts_with = "input")]
    pub bell: Option<String>,
    /// Gate modes: `ns` MODE, `csign` A,B, `cswap` CONTROL,P,Q.
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<usize>>,
    /// Exact branch enumeration (the default).
    #[arg(long, conflicts_with = "sample")]
    pub exact: bool,
    /// Monte Carlo trials drawn from the exact branch law.
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the heralded output state here.
    #[arg(long)]
    pub dump_state: Option<PathBuf>,
    /// Print failure branches as well.
    #[arg(long)]
    pub branches: bool,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Plain `key = value` file with any of: d, parties, backend, n, network,
    /// sample, seed, branch_cap. Flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub parties: Option<usize>,
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// generic or searched.
    #[arg(long)]
    pub network: Option<String>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Confusion-matrix CSV destination.
    #[arg(long)]
    pub confusion: Option<PathBuf>,
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub branch_cap: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum NetworkCommand {
    /// Exhaustive search for a C-SHIFT network with at most K C-SWAPs.
    Search {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        max_swaps: usize,
    },
    /// Print the generic transposition network.
    Generic {
        #[arg(long)]
        d: usize,
    },
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Matrix file: one row per line, entries `RE` or `RE,IM`.
    #[arg(long)]
    pub unitary: PathBuf,
    /// Netlist destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gate(a) => commands::gate(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Network(c) => commands::network(&c),
        Command::Decompose(a) => commands::decompose(&a),
    };
    match outcome {
        Ok(violations) if violations.is_empty() => ExitCode::SUCCESS,
        Ok(violations) => {
            for v in violations {
                eprintln!("invariant violated: {v}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
