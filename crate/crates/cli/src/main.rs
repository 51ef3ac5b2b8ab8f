//! `glycansynth`: synthesize glycan production rules, verify rule sets and enumerate closures.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit code for a failed verification or an empty budget.
pub const EXIT_NO: u8 = 2;
/// Exit code when the solver could not decide.
pub const EXIT_INCONCLUSIVE: u8 = 3;
/// Exit code for usage, input, output and solver errors.
pub const EXIT_ERROR: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "glycansynth", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a rule set that produces exactly the observed molecules.
    Synth(SynthArgs),
    /// Check a rule set against a dataset with the production oracle.
    Verify(VerifyArgs),
    /// Print every molecule a rule set produces from single monomers.
    Enum(EnumArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Quantified,
    InstantiateOnly,
}

#[derive(Args, Debug, Clone)]
struct Semantics {
    /// Honor fast/slow rule dominance.
    #[arg(long)]
    fast_slow: bool,
    /// Accept repeated units: spines of up to D0 slots, up to R0 extra copies.
    #[arg(long, num_args = 2, value_names = ["D0", "R0"])]
    repeats: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Dataset file with `sugar` and `mol` statements.
    dataset: PathBuf,
    /// Number of rules.
    #[arg(long)]
    rules: usize,
    /// Rule depth in levels, at least 2.
    #[arg(long)]
    depth: usize,
    /// Template width [default: largest arity].
    #[arg(long)]
    width: Option<usize>,
    /// Molecule template height [default: tallest observed molecule].
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, default_value_t = 1)]
    compartments: u32,
    /// Solver executable.
    #[arg(long, env = glycan_smt::SOLVER_ENV, default_value = "z3")]
    solver: PathBuf,
    /// Per-query solver timeout in milliseconds.
    #[arg(long, default_value_t = 60_000)]
    timeout: u64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// How rejected counterexamples constrain later candidates.
    #[arg(long, value_enum, default_value_t = Mode::Quantified)]
    mode: Mode,
    #[command(flatten)]
    semantics: Semantics,
    /// Allow rules to require empty slots.
    #[arg(long)]
    hard_ends: bool,
    /// Drop the ordering constraints between rule templates.
    #[arg(long)]
    no_symmetry_breaking: bool,
    /// Write Graphviz files for the rules and counterexamples here.
    #[arg(long, value_name = "DIR")]
    dot: Option<PathBuf>,
    /// Write every solver query as a standalone SMT-LIB2 script here.
    #[arg(long, value_name = "DIR")]
    dump_smt: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Rule file.
    rules: PathBuf,
    /// Dataset file.
    dataset: PathBuf,
    /// Height bound [default: tallest observed molecule].
    #[arg(long)]
    height: Option<usize>,
    /// Compartment count [default: largest compartment used by a rule].
    #[arg(long)]
    compartments: Option<u32>,
    #[command(flatten)]
    semantics: Semantics,
    /// Write Graphviz files for the extra molecules here.
    #[arg(long, value_name = "DIR")]
    dot: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnumArgs {
    /// Rule file.
    rules: PathBuf,
    /// File declaring the alphabet with `sugar` statements.
    alphabet: PathBuf,
    /// Height bound.
    #[arg(long)]
    height: usize,
    #[arg(long)]
    compartments: Option<u32>,
    #[command(flatten)]
    semantics: Semantics,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Verify(a) => commands::verify(a),
        Command::Enum(a) => commands::enumerate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
