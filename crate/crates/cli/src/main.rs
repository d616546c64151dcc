mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, EXIT_USAGE};

/// Exact coefficients and asymptotics of prod (1 - x^k)^(-F_{k+z}).
#[derive(Debug, Parser)]
#[command(name = "fibeuler", version)]
pub struct Cli {
    /// Read defaults from a `key = value` file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for cached OEIS b-files.
    #[arg(long, global = true, env = "FIBEULER_CACHE_DIR", value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Never use the network.
    #[arg(long, global = true)]
    pub offline: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a_0..a_N in b-file format.
    Terms(TermsArgs),
    /// Print S(z), c(z) and the golden ratio.
    Constants(ConstantsArgs),
    /// Compare the saddle point with its large-n expansion.
    Saddle(SaddleArgs),
    /// Tabulate a_n against the asymptotic formula and check convergence.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TermsArgs {
    #[arg(short = 'z')]
    pub z: Option<i64>,
    /// Largest index.
    #[arg(short = 'N')]
    pub n: Option<u64>,
    /// Write to a file instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConstantsArgs {
    #[arg(short = 'z')]
    pub z: Option<i64>,
    /// Significant digits to certify.
    #[arg(short = 'd', long)]
    pub digits: Option<u32>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SaddleArgs {
    #[arg(short = 'n')]
    pub n: Option<u64>,
    #[arg(short = 'z')]
    pub z: Option<i64>,
    #[arg(short = 'd', long)]
    pub digits: Option<u32>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[arg(short = 'z')]
    pub z: Option<i64>,
    /// Largest index.
    #[arg(short = 'N', conflicts_with = "full")]
    pub n: Option<u64>,
    /// Sample every `stride`-th index.
    #[arg(long)]
    pub stride: Option<u64>,
    #[arg(short = 'd', long)]
    pub digits: Option<u32>,
    /// Write the ratio table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Write the ratio plot as SVG.
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
    /// Compare the first 100 terms with the OEIS b-file.
    #[arg(long)]
    pub oeis: bool,
    /// Run to N = 20000.
    #[arg(long)]
    pub full: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(e.exit_code())
        }
    }
}

fn report(e: &CliError) {
    eprintln!("fibeuler: {e}");
    if let CliError::Core(fibeuler::Error::NotCertified { .. }) = e {
        eprintln!("fibeuler: refusing to print digits that did not survive precision escalation");
    }
}
