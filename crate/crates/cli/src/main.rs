//! `poa`: worst-case price of anarchy certification from the command line.
//!
//! Every subcommand prints one JSON report on stdout. Exit codes: 0 success,
//! 2 invalid input or cap exceeded, 3 solver failure, 4 a guaranteed
//! property failed at runtime (a bug, never a valid outcome).

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use poa_core::game::{Predicate, SocialKind};
use poa_core::{Error, Number, Rational, Scalar};

#[derive(Debug, Parser)]
#[command(name = "poa", version, about = "Worst-case approximate price of anarchy for generalized weighted congestion games")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    args: Args,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// Class configuration file (weights, alpha, beta, basis).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Game file.
    #[arg(long, global = true)]
    pub game: Option<PathBuf>,
    /// Social function; overrides the file.
    #[arg(long, global = true)]
    pub sf: Option<Sf>,
    /// Approximation parameter, decimal or "p/q"; overrides the file.
    #[arg(long, global = true)]
    pub epsilon: Option<Number>,
    /// Equilibrium predicate (default eq1, and verbatim for cce-poa).
    #[arg(long, global = true)]
    pub predicate: Option<PredicateArg>,
    /// Exact rational arithmetic throughout.
    #[arg(long, global = true)]
    pub exact: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Cap on enumerated profiles (pairs for smoothness are capped at cap^2).
    #[arg(long, global = true)]
    pub cap: Option<u128>,
    /// Write the extracted worst-case game here.
    #[arg(long, global = true)]
    pub emit_witness: Option<PathBuf>,
    /// Write the selected primal program here (fixed MPS); the dual goes to
    /// the same path with `.dual` before the extension.
    #[arg(long, global = true)]
    pub emit_lp: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Sf {
    Sum,
    Max,
}

impl From<Sf> for SocialKind {
    fn from(s: Sf) -> Self {
        match s {
            Sf::Sum => SocialKind::Sum,
            Sf::Max => SocialKind::Max,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PredicateArg {
    Eq1,
    Verbatim,
}

impl From<PredicateArg> for Predicate {
    fn from(p: PredicateArg) -> Self {
        match p {
            PredicateArg::Eq1 => Predicate::Eq1,
            PredicateArg::Verbatim => Predicate::Verbatim,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Print the representative model for the configuration's weights.
    BuildRepresentative {
        #[arg(value_name = "CONFIG")]
        file: Option<PathBuf>,
    },
    /// Solve the worst-case programs of a class.
    SolveWorstCase {
        #[arg(value_name = "CONFIG")]
        file: Option<PathBuf>,
    },
    /// Exact pure price of anarchy of a game by enumeration.
    ExactPpoa {
        #[arg(value_name = "GAME")]
        file: Option<PathBuf>,
    },
    /// Exact coarse correlated price of anarchy of a game by LP.
    CcePoa {
        #[arg(value_name = "GAME")]
        file: Option<PathBuf>,
    },
    /// List the approximate pure equilibria of a game.
    EnumeratePne {
        #[arg(value_name = "GAME")]
        file: Option<PathBuf>,
    },
    /// Rescale a game so that its social optimum is 1.
    Normalize {
        #[arg(value_name = "GAME")]
        file: Option<PathBuf>,
    },
    /// Check that the class dual solution stays feasible on other games.
    VerifyExtension {
        #[arg(value_name = "CONFIG")]
        file: Option<PathBuf>,
        /// Random (model, p, o) triples when no game is given.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Robust price of anarchy and comparison with exact ratios.
    Smoothness {
        #[arg(value_name = "GAME")]
        file: Option<PathBuf>,
    },
    /// Witness, duality and extension checks on the built-in regression grid.
    Selftest {
        /// Random extension triples per configuration.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invalid(_) | Error::SizeCap { .. } | Error::TableMiss { .. } | Error::Degenerate(_) => 2,
        Error::Solver(_) => 3,
        Error::Invariant(_) => 4,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Invalid(_) => "invalid",
        Error::SizeCap { .. } => "size_cap",
        Error::TableMiss { .. } => "table_miss",
        Error::Degenerate(_) => "degenerate",
        Error::Solver(_) => "solver",
        Error::Invariant(_) => "invariant",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = if cli.args.exact {
        commands::run::<Rational>(&cli.command, &cli.args)
    } else {
        commands::run::<f64>(&cli.command, &cli.args)
    };
    match result {
        Ok(value) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("serialisable report"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::json!({ "error": error_kind(&e), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Shared by both arithmetic modes.
pub fn epsilon<S: Scalar>(args: &Args, file: Option<S>) -> S {
    args.epsilon.as_ref().map(Number::get).or(file).unwrap_or_else(S::zero)
}
