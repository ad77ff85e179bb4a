//! `onesided`: command-line front end for onesided-core.
//!
//! Exit codes: 0 success or PASS, 1 a bound violated by exhaustive
//! evaluation, 2 invalid input, 3 budget exhausted or INCONCLUSIVE,
//! 4 a hypothesis is not met.

mod commands;
mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use onesided_core::bounds::TheoremId;
use onesided_core::Error;

use crate::output::{Format, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RestrictArg {
    All,
    Odd,
    /// Multiples of the torsion order of the angle group.
    Torsion,
}

#[derive(Debug, Parser)]
#[command(name = "onesided", version, about = "One-sided infima of conjugate-closed power sums and cosine sums")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Scan length, or candidate budget for witness and certify.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "all")]
    pub restrict: RestrictArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of s_k (or f(k) for a cosine config) over an inclusive k-range.
    Eval {
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        from: i64,
        #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
        to: i64,
    },
    /// Every bound with its hypothesis flags.
    Bounds,
    /// Check one bound against a search for small values.
    Verify {
        #[arg(long)]
        theorem: TheoremId,
    },
    /// Root-of-unity ratio detection.
    Degeneracy,
    /// Torsion/free decomposition of the angle group and a projection to one frequency.
    Decompose,
    /// Minimum over real t and over the torus.
    Continuous {
        #[arg(long)]
        resolution: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Integer k with |β_i t0 - β_i k - m_i| < δ for the declared basis.
    Witness {
        /// Real target as a decimal or p/q.
        #[arg(long, allow_negative_numbers = true)]
        t0: String,
    },
    /// Witness-side check that the discrete and continuous infima agree.
    Certify,
    /// The tightness example z_j = e^{2πij/(n+1)}, b_j = 1.
    Extremal {
        #[arg(long)]
        n: usize,
        /// Print only the config, ready for --config.
        #[arg(long)]
        config_only: bool,
    },
    /// Verify every applicable bound for each *.json config in a directory.
    Corpus {
        #[arg(long)]
        dir: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Bounds => "bounds",
            Command::Verify { .. } => "verify",
            Command::Degeneracy => "degeneracy",
            Command::Decompose => "decompose",
            Command::Continuous { .. } => "continuous",
            Command::Witness { .. } => "witness",
            Command::Certify => "certify",
            Command::Extremal { .. } => "extremal",
            Command::Corpus { .. } => "corpus",
        }
    }
}

/// A failed run: the diagnostic and its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExhausted { .. } => 3,
            Error::Hypothesis(_) | Error::Degenerate(_) => 4,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

/// What a command produced: its result value, extra manifest entries, and exit code.
pub struct Outcome {
    pub result: serde_json::Value,
    pub budgets: BTreeMap<String, serde_json::Value>,
    pub args: BTreeMap<String, serde_json::Value>,
    pub code: u8,
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<u8, Failure> {
    let outcome = commands::dispatch(cli)?;
    if let Command::Extremal { config_only: true, .. } = cli.command {
        serde_json::to_writer_pretty(&mut *out, &outcome.result["config"]).map_err(std::io::Error::from)?;
        writeln!(out)?;
        return Ok(outcome.code);
    }
    let manifest = RunManifest {
        command: cli.command.name().into(),
        config_path: cli.config.as_ref().map(|p| p.display().to_string()),
        budgets: outcome.budgets,
        args: outcome.args,
        seed: cli.seed,
        output_format: cli.format,
        precision_bits: onesided_core::relation::default_precision_bits(),
        version: env!("CARGO_PKG_VERSION"),
    };
    output::emit(out, &manifest, &outcome.result)?;
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let _ = lock.flush();
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
