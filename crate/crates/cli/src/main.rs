//! `qwalk` — build, convert, verify, and search discrete-time quantum walks.
//!
//! Exit codes: 0 success, 1 validation failure (machine-readable JSON error on
//! stderr), 2 I/O failure.

mod demo;
mod ops;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Quantum-walk models, conversions, and search")]
pub struct Cli {
    /// Comparison tolerance; overrides the QWALK_TOL environment variable.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Coined,
    Szegedy,
    Staggered,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpKind {
    /// The evolution operator as a dense matrix.
    Operator,
    /// The model's uniform initial state.
    State,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate a walk input and print a structural summary.
    Build {
        #[arg(long)]
        input: PathBuf,
        /// Summary JSON destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a walk between models.
    Convert {
        #[arg(long, value_enum)]
        from: Model,
        #[arg(long, value_enum)]
        to: Model,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the basis map tying the two operators together.
        #[arg(long)]
        map_out: Option<PathBuf>,
    },
    /// Compare two evolution operators through a basis map.
    Verify {
        /// First walk or operator file (the smaller side).
        #[arg(long)]
        a: PathBuf,
        /// Second walk or operator file.
        #[arg(long)]
        b: PathBuf,
        /// Basis map file; identity when omitted (dimensions must match).
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a marked-vertex search and record the probability trace.
    Search {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        graph: PathBuf,
        /// Marked positions, comma separated (vertices, x-indices, or alpha
        /// polygon indices depending on the model).
        #[arg(long, value_delimiter = ',')]
        marked: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the full per-position probability CSV (`t,prob_v0,...`).
        #[arg(long)]
        per_position_out: Option<PathBuf>,
    },
    /// Dump a walk's evolution operator (or canonical initial state).
    Dump {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DumpKind::Operator)]
        what: DumpKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the bundled end-to-end pipelines (deterministic artifacts).
    Demo {
        #[arg(long)]
        out_dir: PathBuf,
        /// Seed for the randomized round-trip instance.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

pub struct RunConfig {
    pub tolerance: f64,
}

fn tolerance_from(cli: &Cli) -> Result<f64, ops::CliError> {
    if let Some(t) = cli.tolerance {
        if t <= 0.0 {
            return Err(ops::CliError::invalid(format!(
                "tolerance must be positive, got {t}"
            )));
        }
        return Ok(t);
    }
    match std::env::var("QWALK_TOL") {
        Ok(raw) => {
            let t: f64 = raw
                .parse()
                .map_err(|_| ops::CliError::invalid(format!("bad QWALK_TOL value '{raw}'")))?;
            if t <= 0.0 {
                return Err(ops::CliError::invalid(format!(
                    "QWALK_TOL must be positive, got {t}"
                )));
            }
            Ok(t)
        }
        Err(_) => Ok(1e-10),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match tolerance_from(&cli) {
        Ok(tolerance) => RunConfig { tolerance },
        Err(err) => return err.report(),
    };
    let result = match cli.command {
        Command::Build { ref input, ref out } => ops::build(input, out.as_deref(), &config),
        Command::Convert {
            from,
            to,
            ref input,
            ref out,
            ref map_out,
        } => ops::convert(from, to, input, out, map_out.as_deref()),
        Command::Verify {
            ref a,
            ref b,
            ref map,
            ref out,
        } => ops::verify(a, b, map.as_deref(), out.as_deref(), &config),
        Command::Search {
            model,
            ref graph,
            ref marked,
            steps,
            ref out,
            ref per_position_out,
        } => ops::search(model, graph, marked, steps, out, per_position_out.as_deref()),
        Command::Dump {
            ref input,
            what,
            ref out,
        } => ops::dump(input, what, out.as_deref()),
        Command::Demo { ref out_dir, seed } => demo::run(out_dir, seed, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => err.report(),
    }
}
