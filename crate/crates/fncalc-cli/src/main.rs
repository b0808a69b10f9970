use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fncalc_cli::{parse_document, run_document, Format, RunError, RunOptions};

/// Exact symbolic calculus of tangent-bundle-valued forms: brackets,
/// calibrations, V-data multibrackets, and formal deformation solving.
#[derive(Parser, Debug)]
#[command(name = "fncalc", version, about)]
struct Args {
    /// Input file; reads stdin when absent or `-`.
    input: Option<PathBuf>,

    /// Output format for RESULT lines.
    #[arg(long, value_parser = ["text", "json"], default_value = "text")]
    format: String,

    /// Directory holding fixture files (`<name>.fn`).
    #[arg(long, default_value = "fixtures")]
    fixtures_dir: PathBuf,

    /// Seed for sampling-based commands (vdata-validate).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = match parse_document(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        format: if args.format == "json" {
            Format::Json
        } else {
            Format::Text
        },
        fixtures_dir: args.fixtures_dir,
        seed: args.seed,
    };
    match run_document(&doc, &opts) {
        Ok(out) => {
            for line in &out.lines {
                println!("{line}");
            }
            if out.all_verdicts_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(RunError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(RunError::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> std::io::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}
