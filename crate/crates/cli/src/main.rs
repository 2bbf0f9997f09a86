use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dimerlab_cli::{configure_threads, run, Command};

/// Two-mode analysis of nonlinear Schrödinger dynamics in a symmetric double well.
#[derive(Debug, Parser)]
#[command(name = "dimerlab", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the output files (created if missing).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Also write an SVG plot.
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result =
        configure_threads().and_then(|()| run(args.command, &args.config, &args.out_dir, args.svg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dimerlab {}: {e}", args.command.as_str());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
