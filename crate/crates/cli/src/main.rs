//! Command-line front end for the edgezeta library.

#![forbid(unsafe_code)]

mod args;
mod cache;
mod commands;
mod error;
mod output;
mod verify;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Args, Format};
use error::{CliError, CliResult};
use output::{EmbeddedConfig, Record};

fn embedded_config(args: &Args) -> EmbeddedConfig {
    EmbeddedConfig {
        command: args.command(),
        tau: args.tau,
        theta: args.theta,
        t_scale: args.t_scale,
        y: args.y,
        q: args.q,
        z1: args.z1.map(|z| z.to_string()),
        z2: args.z2.map(|z| z.to_string()),
        n_samples: args.n_samples,
        n_points: args.n_points,
        seed: args.seed(),
        tol: args.tol,
        lo: args.lo,
        hi: args.hi,
    }
}

fn run(args: &Args) -> CliResult<()> {
    let plan = commands::validate(args)?;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))?;
    }
    if let Some(limit) = plan.prime_limit() {
        cache::prepare(limit as u64);
    }
    let start = Instant::now();
    let command = format!("{:?}", args.command()).to_lowercase();
    let record = Record::new(&command, embedded_config(args).to_value(), args.seed(), Vec::new());
    let mut record = commands::execute(&plan, args, record)?;
    let elapsed = start.elapsed().as_secs_f64();
    eprintln!("wall time: {elapsed:.3} s");
    if args.wall_time {
        record.wall_time = Some(elapsed);
    }
    match &args.out {
        Some(path) => record.write(path, args.format)?,
        None if args.command() == args::Command::Verify => {}
        None => {
            let text = match args.format {
                Format::Json => serde_json::to_string_pretty(&record.to_json()).expect("serialisable") + "\n",
                Format::Csv => record.to_csv(),
            };
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    if record.failures > 0 {
        return Err(CliError::VerifyFailed(record.failures));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Args::parse().resolve().and_then(|args| run(&args)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edgezeta: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
