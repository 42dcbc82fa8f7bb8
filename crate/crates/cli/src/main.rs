use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use thz_turb::{emit, resolve, run_scenario, CliError, OutputFormat};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Terahertz turbulence channel sweeps.
///
/// TARGET is a computation (risc-profile, rytov, nc, losc, gg-pdf,
/// attenuation, link-budget, capacity, channel-sample) or a figure preset
/// (fig4, fig5a, fig5b, fig6a, fig6b, fig6c, fig7, fig8, fig9a, fig9b).
#[derive(Debug, Parser)]
#[command(name = "thz-turb", version)]
struct Args {
    target: String,
    /// Scenario file (required for computations, not accepted for presets).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Master seed, overriding the scenario's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the validated scenario in canonical form and exit.
    #[arg(long)]
    print_config: bool,
}

fn run(args: Args) -> Result<(), CliError> {
    let mut cfg = resolve(&args.target, args.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(f) = args.format {
        cfg.output.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if args.out.is_some() {
        cfg.output.path = args.out;
    }
    if args.print_config {
        print!("{}", cfg.canonical());
        return Ok(());
    }
    let table = run_scenario(&cfg)?;
    emit(&table, cfg.output.format, cfg.output.path.as_deref())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
