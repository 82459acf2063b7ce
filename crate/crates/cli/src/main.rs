//! Batch front-end: load channel files, run the capacity solvers, bound
//! checkers and scenario generators, and emit deterministic text or CSV
//! reports.
//!
//! Exit codes: 0 ok, 1 verification violation, 2 input error, 3 resource
//! cap exceeded, 4 solver non-convergence.

mod report;
mod scenario;
mod solve;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use sicap::capacity::{SolveConfig, SolveError};
use sicap::channel::ChannelError;

#[derive(Parser)]
#[command(name = "sicap", version, about = "Capacity workbench for channels with side information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(clap::Args, Clone)]
pub struct CommonOpts {
    /// Seed for every randomized search path.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Solver tolerance in bits.
    #[arg(long = "tol-bits", default_value_t = 1e-9)]
    pub tol_bits: f64,
    #[arg(long = "max-iter", default_value_t = 5000)]
    pub max_iter: usize,
    /// Random restarts per deterministic-map branch.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Cap on enumerated strategy letters |X|^|S_T|.
    #[arg(long = "cap-strategies", default_value_t = 4096)]
    pub cap_strategies: usize,
    /// Budget on grid-oracle objective evaluations.
    #[arg(long = "cap-grid", default_value_t = 10_000_000)]
    pub cap_grid: u128,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here (atomically) instead of standard output.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

impl CommonOpts {
    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            tol_bits: self.tol_bits,
            max_iter: self.max_iter,
            restarts: self.restarts,
            seed: self.seed,
            strategy_cap: self.cap_strategies,
            grid_budget: self.cap_grid,
            ..SolveConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute a capacity of a channel file.
    Solve {
        channel_file: std::path::PathBuf,
        #[arg(long, value_enum)]
        case: solve::Case,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run a seeded verification sweep for one of the named suites.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        /// Number of seeded instances (suites with a fixed instance list
        /// ignore this).
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Generate a named example channel, write its file and report the
    /// capacity/bound table.
    Scenario {
        #[arg(value_enum)]
        name: scenario::Name,
        /// Block length for block-static expansion.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Switch-on probability for the random-access scenarios.
        #[arg(long = "p-on", default_value_t = 0.5)]
        p_on: f64,
        /// Reveal the switch state to the receiver.
        #[arg(long = "rx-knows", default_value_t = false)]
        rx_knows: bool,
        /// Where to write the generated channel file.
        #[arg(long = "channel-out")]
        channel_out: Option<std::path::PathBuf>,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

/// Failure modes mapped onto the documented exit codes.
pub enum CliError {
    /// Exit 2: unreadable, unparsable or invalid input.
    Input(String),
    /// Exit 3: a configured resource cap refused the computation.
    Cap(String),
    /// Exit 4: a solver hit its iteration limit before converging.
    NonConvergence(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Cap(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Cap(m) | CliError::NonConvergence(m) => m,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match &e {
            SolveError::Channel(ChannelError::StrategyCapExceeded { .. })
            | SolveError::Channel(ChannelError::ExpansionCapExceeded { .. })
            | SolveError::GridBudget { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<sicap::io::IoError> for CliError {
    fn from(e: sicap::io::IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve {
            channel_file,
            case,
            opts,
        } => solve::run(&channel_file, case, &opts),
        Command::Verify { suite, count, opts } => verify::run(suite, count, &opts),
        Command::Scenario {
            name,
            n,
            p_on,
            rx_knows,
            channel_out,
            opts,
        } => scenario::run(name, n, p_on, rx_knows, channel_out.as_deref(), &opts),
    };
    match outcome {
        Ok(violations) => {
            if violations {
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
