//! `cwshape`: generate, shape and analyze constant-modulus CW waveforms.

mod analyze;
mod generate;
mod output;
mod shape;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "cwshape", version, about = "Constant-modulus CW radar waveform synthesis and analysis")]
struct Cli {
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a prototype waveform period.
    #[command(subcommand)]
    Generate(generate::Kind),
    /// Alternating projections onto a spectral mask and the unit-modulus set.
    Shape(shape::ShapeArgs),
    /// Spectrum, correlation and ambiguity metrics.
    #[command(subcommand)]
    Analyze(analyze::Which),
    /// Check the Costas property of a permutation of 1..n.
    VerifyCostas(VerifyArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Comma-separated permutation, e.g. 1,3,2
    #[arg(long, value_delimiter = ',', required = true)]
    perm: Vec<usize>,
}

/// Where a command writes its files.
#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output path prefix; files get suffixes such as `.wfm`, `.csv`, `.json`.
    #[arg(short, long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_level))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();

    let argv: Vec<String> = std::env::args().collect();
    let result = match cli.command {
        Command::Generate(kind) => generate::run(kind, argv),
        Command::Shape(args) => shape::run(args, argv),
        Command::Analyze(which) => analyze::run(which, argv),
        Command::VerifyCostas(args) => verify_costas(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn verify_costas(args: &VerifyArgs) -> anyhow::Result<()> {
    let ok = cwshape_core::wavegen::verify_costas_slice(&args.perm)?;
    println!("{{\"order\": {}, \"costas\": {ok}}}", args.perm.len());
    Ok(())
}
