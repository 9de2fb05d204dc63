//! Validation and execution of each command.

use edgezeta::arith::is_prime;
use edgezeta::divisor::{moment_series, Truncation};
use edgezeta::euler::zeta_line_checked;
use edgezeta::experiments::{arg_normality, empirical_tail, moment_integral, scan};
use edgezeta::randmodel::{mc_moment, mc_tail, tail_formula, tail_log_exponent, ModelConfig};
use edgezeta::torus::{box_measure, BoxSpec};
use edgezeta::{dirichlet, Error};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::args::{Args, Command};
use crate::error::{config, CliError, CliResult};
use crate::output::{Cell, Record};

const DEFAULT_TOL: f64 = 1e-10;
const MAX_PRIME_LIMIT: f64 = 1e9;
const MAX_GRID_POINTS: usize = 50_000_000;
const MAX_SAMPLES: usize = 100_000_000;
/// Budget on `n_points · T` for grids of the untruncated `ζ(1+it)`.
const MAX_ZETA_WORK: f64 = 1e12;
const MAX_MODULUS: u64 = 1_000_000;

/// A fully validated run.
#[derive(Debug, Clone)]
pub enum Plan {
    Primes { y: f64 },
    Moments { z1: Complex64, z2: Complex64, y: f64, tol: f64, samples: Option<usize>, grid: Option<(f64, usize)> },
    Tail { tau: f64, theta: f64, y: Option<f64>, samples: Option<usize>, grid: Option<(f64, usize)> },
    Scan { t_scale: f64, n_points: usize, y: f64, tol: f64 },
    Torus { t_scale: f64, y: f64, lo: f64, hi: f64 },
    Dirichlet { q: u64 },
    Normality { t_scale: f64, tau: f64, y: f64, n_points: usize },
    Verify { samples: usize },
}

fn need<T>(v: Option<T>, name: &str, command: Command) -> CliResult<T> {
    v.ok_or_else(|| CliError::Config(format!("--{name} is required for {command:?}").to_lowercase()))
}

fn finite_positive(x: f64, name: &str) -> CliResult<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return config(format!("--{name} must be positive and finite, got {x}"));
    }
    Ok(x)
}

fn non_negative(x: f64, name: &str) -> CliResult<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return config(format!("--{name} must be non-negative and finite, got {x}"));
    }
    Ok(x)
}

/// `y` for a finite Euler product.
fn finite_y(y: f64) -> CliResult<f64> {
    if !(y >= 2.0 && y.is_finite()) {
        return config(format!("--y must be finite and at least 2 here, got {y}"));
    }
    if y > MAX_PRIME_LIMIT {
        return Err(Error::Resource(format!("--y = {y} exceeds the prime table budget {MAX_PRIME_LIMIT:e}")).into());
    }
    Ok(y)
}

fn tolerance(tol: Option<f64>) -> CliResult<f64> {
    let tol = tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol < 1.0) {
        return config(format!("--tol must lie in (0, 1), got {tol}"));
    }
    Ok(tol)
}

fn samples(n: usize) -> CliResult<usize> {
    if n < 2 {
        return config(format!("--n-samples must be at least 2, got {n}"));
    }
    if n > MAX_SAMPLES {
        return Err(Error::Resource(format!("--n-samples = {n} exceeds the budget {MAX_SAMPLES}")).into());
    }
    Ok(n)
}

fn grid(t_scale: f64, n_points: usize) -> CliResult<(f64, usize)> {
    finite_positive(t_scale, "T")?;
    if n_points < 2 {
        return config(format!("--n-points must be at least 2, got {n_points}"));
    }
    if n_points > MAX_GRID_POINTS {
        return Err(Error::Resource(format!("--n-points = {n_points} exceeds the budget {MAX_GRID_POINTS}")).into());
    }
    Ok((t_scale, n_points))
}

/// Optional grid: both `--T` and `--n-points`, or neither.
fn optional_grid(args: &Args) -> CliResult<Option<(f64, usize)>> {
    match (args.t_scale, args.n_points) {
        (Some(t), Some(n)) => grid(t, n).map(Some),
        (None, None) => Ok(None),
        _ => config("--T and --n-points must be given together"),
    }
}

/// Checks every parameter of `args` against the preconditions of its command.
pub fn validate(args: &Args) -> CliResult<Plan> {
    let cmd = args.command();
    if let Some(0) = args.threads {
        return config("--threads must be at least 1");
    }
    Ok(match cmd {
        Command::Primes => Plan::Primes { y: finite_y(need(args.y, "y", cmd)?)? },
        Command::Moments => {
            let z1 = args.z1.map_or(Complex64::new(1.0, 0.0), |z| z.value());
            let z2 = args.z2.map_or(Complex64::new(1.0, 0.0), |z| z.value());
            let y = args.y.unwrap_or(f64::INFINITY);
            if !(y >= 2.0) {
                return config(format!("--y must be at least 2 or inf, got {y}"));
            }
            let samples = args.n_samples.map(samples).transpose()?;
            let grid = optional_grid(args)?;
            if samples.is_some() || grid.is_some() {
                finite_y(y)?;
            }
            Plan::Moments { z1, z2, y, tol: tolerance(args.tol)?, samples, grid }
        }
        Command::Tail => {
            let tau = non_negative(need(args.tau, "tau", cmd)?, "tau")?;
            let theta = non_negative(args.theta.unwrap_or(0.0), "theta")?;
            let samples = args.n_samples.map(samples).transpose()?;
            let grid = optional_grid(args)?;
            let y = match (samples.is_some() || grid.is_some(), args.y) {
                (false, _) => None,
                (true, Some(y)) => Some(finite_y(y)?),
                (true, None) => return config("--y is required for sampled or grid tails"),
            };
            if tau <= 1.0 && y.is_none() {
                return config(format!("tau = {tau} has no main-term formula; give --n-samples or a grid"));
            }
            Plan::Tail { tau, theta, y, samples, grid }
        }
        Command::Scan => {
            let (t_scale, n_points) = grid(need(args.t_scale, "T", cmd)?, need(args.n_points, "n-points", cmd)?)?;
            let y = need(args.y, "y", cmd)?;
            let tol = tolerance(args.tol)?;
            if y.is_infinite() && y > 0.0 {
                if t_scale < 0.5 {
                    return config(format!("zeta(1+it) needs |t| >= 0.5, got T = {t_scale}"));
                }
                if n_points as f64 * t_scale > MAX_ZETA_WORK {
                    return Err(Error::Resource(format!("n_points * T exceeds {MAX_ZETA_WORK:e}")).into());
                }
            } else {
                finite_y(y)?;
            }
            Plan::Scan { t_scale, n_points, y, tol }
        }
        Command::Torus => {
            let t_scale = finite_positive(need(args.t_scale, "T", cmd)?, "T")?;
            if t_scale < 1.0 {
                return config(format!("--T must be at least 1, got {t_scale}"));
            }
            let y = finite_y(need(args.y, "y", cmd)?)?;
            let (lo, hi) = (args.lo.unwrap_or(0.0), args.hi.unwrap_or(0.5));
            if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                return config(format!("box interval needs 0 <= lo < hi <= 1, got ({lo}, {hi})"));
            }
            Plan::Torus { t_scale, y, lo, hi }
        }
        Command::Dirichlet => {
            let q = need(args.q, "q", cmd)?;
            if !(3..=MAX_MODULUS).contains(&q) || !is_prime(q) {
                return config(format!("--q must be a prime in [3, {MAX_MODULUS}], got {q}"));
            }
            Plan::Dirichlet { q }
        }
        Command::Normality => {
            let (t_scale, n_points) = grid(need(args.t_scale, "T", cmd)?, need(args.n_points, "n-points", cmd)?)?;
            let tau = finite_positive(need(args.tau, "tau", cmd)?, "tau")?;
            let c = edgezeta::arith::Constants::get().c;
            if !(tau - 1.0 - c > 1.0) {
                return config(format!("normality needs log(tau - 1 - C) > 0, i.e. tau > {:.6}", 2.0 + c));
            }
            let y = finite_y(need(args.y, "y", cmd)?)?;
            Plan::Normality { t_scale, tau, y, n_points }
        }
        Command::Verify => Plan::Verify { samples: samples(args.n_samples.unwrap_or(100_000))? },
    })
}

impl Plan {
    /// Largest prime the run will need, for the cache.
    pub fn prime_limit(&self) -> Option<f64> {
        match *self {
            Plan::Primes { y } | Plan::Torus { y, .. } | Plan::Normality { y, .. } => Some(y),
            Plan::Moments { y, .. } | Plan::Scan { y, .. } if y.is_finite() => Some(y),
            Plan::Tail { y, .. } => y,
            _ => None,
        }
    }
}

fn columns(c: &[&'static str]) -> Vec<&'static str> {
    c.to_vec()
}

/// Runs a validated plan and collects its table.
pub fn execute(plan: &Plan, args: &Args, mut record: Record) -> CliResult<Record> {
    let seed = args.seed();
    match *plan {
        Plan::Primes { y } => {
            record.columns = columns(&["rank", "prime"]);
            let table = edgezeta::arith::PrimeTable::shared(y as u64);
            for (i, &p) in table.up_to(y).iter().enumerate() {
                record.push(vec![Cell::from(i + 1), Cell::from(p)]);
            }
        }
        Plan::Moments { z1, z2, y, tol, samples, grid } => {
            record.columns = columns(&["source", "re", "im", "error"]);
            let series = moment_series(z1, z2, Truncation::from_y(y), tol)?;
            let err = series.value.norm() * series.tail_bound.exp_m1();
            record.push(vec!["series".into(), series.value.re.into(), series.value.im.into(), err.into()]);
            if let Some(n) = samples {
                let est = mc_moment(ModelConfig::new(y, n, seed)?, z1, z2)?;
                record.push(vec![
                    "random_model".into(),
                    est.estimate.re.into(),
                    est.estimate.im.into(),
                    est.std_err.into(),
                ]);
            }
            if let Some((t, n)) = grid {
                let m = moment_integral(&scan(t, n, y)?, z1, z2);
                record.push(vec!["grid".into(), m.re.into(), m.im.into(), f64::NAN.into()]);
            }
        }
        Plan::Tail { tau, theta, y, samples, grid } => {
            record.columns = columns(&["source", "tau", "theta", "probability", "std_err", "log_neg_log"]);
            let nll = |p: f64| (-p.ln()).ln();
            if tau > 1.0 {
                let p = tail_formula(tau, theta)?;
                let e = tail_log_exponent(tau, theta)?;
                record.push(vec!["formula".into(), tau.into(), theta.into(), p.into(), 0.0.into(), e.into()]);
            }
            if let (Some(n), Some(y)) = (samples, y) {
                let est = mc_tail(ModelConfig::new(y, n, seed)?, tau, theta)?;
                let p = est.prob_hat;
                record.push(vec![
                    "random_model".into(),
                    tau.into(),
                    theta.into(),
                    p.into(),
                    est.std_err.into(),
                    nll(p).into(),
                ]);
            }
            if let (Some((t, n)), Some(y)) = (grid, y) {
                let p = empirical_tail(&scan(t, n, y)?, tau, theta)?;
                record.push(vec!["grid".into(), tau.into(), theta.into(), p.into(), f64::NAN.into(), nll(p).into()]);
            }
        }
        Plan::Scan { t_scale, n_points, y, tol } => {
            record.columns = columns(&["t", "re", "im", "abs", "arg"]);
            let values: Vec<(f64, Complex64)> = if y.is_finite() {
                scan(t_scale, n_points, y)?.samples.into_iter().map(|p| (p.t, p.value)).collect()
            } else {
                edgezeta::experiments::grid_points(t_scale, n_points)
                    .into_par_iter()
                    .map(|t| zeta_line_checked(t, tol).map(|z| (t, z.value)))
                    .collect::<Result<_, _>>()?
            };
            for (t, z) in values {
                record.push(vec![t.into(), z.re.into(), z.im.into(), z.norm().into(), z.arg().into()]);
            }
        }
        Plan::Torus { t_scale, y, lo, hi } => {
            record.columns = columns(&["t", "measure", "expected", "breakpoints", "ratio"]);
            let n = edgezeta::arith::PrimeTable::shared(y as u64).up_to(y).len();
            let spec = BoxSpec::uniform(n, lo, hi)?;
            let r = box_measure(t_scale, y, &spec)?;
            record.push(vec![
                r.t.into(),
                r.measure.into(),
                r.expected.into(),
                r.breakpoints.into(),
                (r.measure / r.expected).into(),
            ]);
        }
        Plan::Dirichlet { q } => {
            record.columns = columns(&["exponent", "re", "im", "abs", "arg"]);
            let table = dirichlet::build_table(q)?;
            let values = dirichlet::l1_all(&table);
            for (e, v) in values.values().iter().enumerate() {
                record.push(vec![(e + 1).into(), v.re.into(), v.im.into(), v.norm().into(), v.arg().into()]);
            }
        }
        Plan::Normality { t_scale, tau, y, n_points } => {
            record.columns = columns(&[
                "tau",
                "epsilon",
                "k",
                "ks_distance",
                "sample_count",
                "weighted_mean",
                "weighted_sd",
                "effective_count",
            ]);
            let r = arg_normality(t_scale, tau, y, n_points)?;
            record.push(vec![
                r.tau.into(),
                r.epsilon.into(),
                r.k.into(),
                r.ks_distance.into(),
                r.sample_count.into(),
                r.weighted_mean.into(),
                r.weighted_sd.into(),
                r.effective_count.into(),
            ]);
        }
        Plan::Verify { samples } => {
            record.columns = columns(&["check", "pass", "value", "reference", "tolerance"]);
            let checks = crate::verify::run(seed, samples)?;
            for c in &checks {
                println!(
                    "{} {}: {} vs {} (tolerance {})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.reference,
                    c.tolerance
                );
                record.failures += usize::from(!c.pass);
                record.push(vec![c.name.into(), c.pass.into(), c.value.into(), c.reference.into(), c.tolerance.into()]);
            }
        }
    }
    Ok(record)
}
