use std::path::PathBuf;
use std::process::ExitCode;

use cantor_actions::cli::{parse_config, run, verify, RunOutcome, Status};
use clap::Parser;

/// Finite-depth checks on Cantor actions, driven by a configuration file.
///
/// Exit status: 0 passed or certified, 1 violated with a witness,
/// 2 inconclusive within bounds, 3 input error.
#[derive(Parser, Debug)]
#[command(name = "cantor-actions", version)]
struct Args {
    /// Configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Directory for witness, certificate and DOT files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Re-check a previously emitted witness or certificate instead of running.
    #[arg(long)]
    verify: Option<PathBuf>,
    /// Suppress the report on standard output.
    #[arg(long)]
    quiet: bool,
}

fn input_error(msg: String) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(Status::InputError.code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return input_error(format!("cannot read {}: {e}", args.config.display())),
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return input_error(e.to_string()),
    };
    let outcome: RunOutcome = match &args.verify {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(a) => verify(&cfg, &a),
            Err(e) => return input_error(format!("cannot read {}: {e}", path.display())),
        },
        None => run(&cfg),
    };
    if !args.quiet {
        print!("{}", outcome.report);
    }
    if args.verify.is_none() {
        let mut files = Vec::new();
        if let Some((name, contents)) = &outcome.artifact {
            files.push((name.clone(), contents.clone()));
        }
        if let Some(name) = &cfg.report_name {
            files.push((name.clone(), outcome.report.clone()));
        }
        if !files.is_empty() {
            if let Err(e) = std::fs::create_dir_all(&args.out) {
                return input_error(format!("cannot create {}: {e}", args.out.display()));
            }
        }
        for (name, contents) in files {
            let path = args.out.join(name);
            if let Err(e) = std::fs::write(&path, contents) {
                return input_error(format!("cannot write {}: {e}", path.display()));
            }
        }
    }
    ExitCode::from(outcome.status.code() as u8)
}
