use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use exset::{Mode, Overrides};

/// Build an entire function with prescribed kinds of values on a finite point set.
#[derive(Parser, Debug)]
#[command(name = "exset", version)]
struct Args {
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Directory for the output files.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of stages; must equal the number of full-support points.
    #[arg(long)]
    stages: Option<usize>,
    /// Degree of the finalized prefix.
    #[arg(long)]
    degree: Option<u32>,
    /// Maximum bits of π used by magnitude certification.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long, value_parser = ["prescribe", "exceptional"])]
    mode: Option<String>,
    /// Re-check every invariant and write certificate.json.
    #[arg(long)]
    verify: bool,
    /// Write psi.json with the symmetrized function.
    #[arg(long)]
    emit_psi: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides {
        seed: args.seed,
        stages: args.stages,
        degree: args.degree,
        precision: args.precision,
        mode: args.mode.as_deref().and_then(Mode::from_name),
    };
    match exset::run(&args.input, &args.out, &overrides, args.verify, args.emit_psi) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
