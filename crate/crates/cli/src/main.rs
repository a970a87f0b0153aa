mod cli;
mod commands;
mod manifest;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use cli::{AcceptanceArgs, Cli, Command, ConvergenceArgs, ReplayArgs, SimulateArgs, StudyArgs};
use manifest::RunManifest;

/// A problem with the command line itself; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<gmgd::Error>() {
            return match e {
                gmgd::Error::Domain(_) | gmgd::Error::InsufficientData(_) => 3,
                gmgd::Error::InvalidSpec(_) | gmgd::Error::Json(_) => 2,
                gmgd::Error::Io(_) => 1,
            };
        }
    }
    1
}

fn replay(args: &ReplayArgs) -> Result<()> {
    let manifest = RunManifest::read(&args.manifest)?;
    let params = manifest.parameters.clone();
    let spec = || {
        manifest
            .spec
            .clone()
            .ok_or_else(|| UsageError("manifest has no embedded spec".into()))
    };
    println!("replaying {} from {}", manifest.command, args.manifest.display());
    match manifest.command.as_str() {
        "simulate" => {
            let mut a: SimulateArgs = serde_json::from_value(params)?;
            if let Some(out) = &args.out {
                a.output.out = out.clone();
            }
            commands::simulate(&a, &spec()?)
        }
        "study" => {
            let mut a: StudyArgs = serde_json::from_value(params)?;
            if let Some(out) = &args.out {
                a.output.out = out.clone();
            }
            commands::study(&a, &spec()?)
        }
        "check-convergence" => {
            let mut a: ConvergenceArgs = serde_json::from_value(params)?;
            if let Some(out) = &args.out {
                a.output.out = out.clone();
            }
            commands::check_convergence(&a, &spec()?)
        }
        "acceptance" => {
            let mut a: AcceptanceArgs = serde_json::from_value(params)?;
            if let Some(out) = &args.out {
                a.out = Some(out.clone());
            }
            commands::acceptance(&a)
        }
        other => Err(UsageError(format!("unknown command {other:?} in manifest")).into()),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        commands::ensure_positive_threads(n)?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a, &commands::load_spec(&a.spec)?),
        Command::Study(a) => commands::study(a, &commands::load_spec(&a.spec)?),
        Command::CheckConvergence(a) => commands::check_convergence(a, &commands::load_spec(&a.spec)?),
        Command::Acceptance(a) => commands::acceptance(a),
        Command::Replay(a) => replay(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
