use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::Value;

use crate::error::{config, CliResult};
use edgezeta::divisor::DivisorOrder;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Primes up to --y. Columns: rank, prime.
    Primes,
    /// E(L^z1 conj(L)^z2) from the divisor series, plus Monte Carlo (--n-samples) and
    /// grid (--T, --n-points) estimates when requested.
    /// Columns: source, re, im, std_err.
    Moments,
    /// Tail Phi(tau, theta): main-term formula, plus random-model and grid estimates.
    /// Columns: source, tau, theta, probability, std_err, log_neg_log.
    Tail,
    /// zeta(1+it, y) on a uniform grid over [T, 2T]. Columns: t, re, im, abs, arg.
    Scan,
    /// Exact box measure for primes up to --y, box (--lo, --hi) in every coordinate.
    /// Columns: t, measure, expected, breakpoints, ratio.
    Torus,
    /// L(1, chi) for the non-principal characters modulo the prime --q, chi_e(g^k) = e^{2 pi i ek/(q-1)}.
    /// Columns: exponent, re, im, abs, arg.
    Dirichlet,
    /// Weighted argument distribution in the slice around e^gamma tau.
    /// Columns: tau, epsilon, k, ks_distance, sample_count, weighted_mean, weighted_sd.
    Normality,
    /// Identity suite with PASS/FAIL lines. Columns: check, pass, value, reference.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Numerical experiments on the joint distribution of |zeta(1+it)| and arg zeta(1+it).
///
/// Numbers are written with 17 significant digits. Output files depend only on the
/// parameters and the seed, never on --threads.
#[derive(Debug, Clone, Parser)]
#[command(name = "edgezeta", version)]
pub struct Args {
    #[arg(long, value_enum, required_unless_present = "config")]
    pub command: Option<Command>,
    /// Re-run the configuration embedded in an earlier output (JSON record or CSV
    /// companion). --out, --format, --threads and --wall-time still apply.
    #[arg(long, conflicts_with_all = ["command", "tau", "theta", "t_scale", "y", "q", "z1", "z2", "n_samples", "n_points", "seed", "tol", "lo", "hi"])]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long = "T")]
    pub t_scale: Option<f64>,
    /// Truncation point; "inf" for the full product where allowed.
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub q: Option<u64>,
    /// Complex order, as "a", "bi" or "a+bi".
    #[arg(long)]
    pub z1: Option<DivisorOrder>,
    #[arg(long)]
    pub z2: Option<DivisorOrder>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; nothing is written when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Lower end of the torus box interval.
    #[arg(long)]
    pub lo: Option<f64>,
    /// Upper end of the torus box interval.
    #[arg(long)]
    pub hi: Option<f64>,
    /// Also record wall time in the output file (makes files run-dependent).
    #[arg(long)]
    pub wall_time: bool,
}

impl Args {
    pub fn command(&self) -> Command {
        self.command.expect("command is resolved before use")
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Replaces the experiment parameters by those stored in the `--config` file.
    pub fn resolve(self) -> CliResult<Args> {
        let Some(path) = &self.config else { return Ok(self) };
        let text = std::fs::read_to_string(path)?;
        let record: Value = serde_json::from_str(&text)
            .map_err(|e| crate::error::CliError::Config(format!("{}: {e}", path.display())))?;
        let Some(Value::Object(cfg)) = record.get("config") else {
            return config(format!("{} holds no embedded config", path.display()));
        };
        let mut argv = vec!["edgezeta".to_string()];
        for (key, value) in cfg {
            let text = match value {
                Value::Null => continue,
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                other => return config(format!("unexpected config value {other} for {key}")),
            };
            let flag = if key == "T" { "--T".to_string() } else { format!("--{}", key.replace('_', "-")) };
            argv.push(flag);
            argv.push(text);
        }
        let parsed = Args::try_parse_from(&argv).map_err(|e| crate::error::CliError::Config(e.to_string()))?;
        Ok(Args { out: self.out, format: self.format, threads: self.threads, wall_time: self.wall_time, ..parsed })
    }
}
