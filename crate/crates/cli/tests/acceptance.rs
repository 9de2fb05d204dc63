//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time limit.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use edgezeta::arith::ddouble::DoubleDouble;
use edgezeta::arith::{mertens_c0, Constants};
use edgezeta::dirichlet::{build_table, l1_all};
use edgezeta::divisor::{
    divisor_table, local_factor_quadrature, local_factor_series, moment_series, ratio_shifted, Truncation,
};
use edgezeta::euler::{py, solve_psi};
use edgezeta::experiments::{arg_normality_on_grid, char_function_check, moment_integral, rotated_moment, scan};
use edgezeta::randmodel::{argument_scan, moment_from_logs, Model, ModelConfig};
use edgezeta::reduce::NeumaierSum;
use edgezeta::torus::{
    box_measure, box_measure_on, linear_form, min_linear_form, prime_logs, single_prime_closed_form, BoxSpec,
};
use num_complex::Complex64;

type Outcome = Result<String, String>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn zeta2() -> f64 {
    PI * PI / 6.0
}

/// `ζ(2)⁴/ζ(4) = 5π⁴/72`.
fn zeta2_4_over_zeta4() -> f64 {
    5.0 * PI.powi(4) / 72.0
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn local_factor_identity() -> Outcome {
    let mut worst = 0.0f64;
    for p in [2u64, 3, 5] {
        for k in [1.0, 2.0, 5.0, 10.0, 50.0] {
            let q = local_factor_quadrature(p, k, 1e-13).map_err(err)?.value.re;
            let s = local_factor_series(p, c(k), c(k), 1e-15).map_err(err)?.value.re;
            worst = worst.max((q - s).abs() / s);
        }
    }
    let q21 = local_factor_quadrature(2, 1.0, 1e-14).map_err(err)?.value.re;
    let s21 = local_factor_series(2, c(1.0), c(1.0), 1e-15).map_err(err)?.value.re;
    let gap = (q21 - 4.0 / 3.0).abs().max((s21 - 4.0 / 3.0).abs());
    ensure(
        worst <= 1e-8 && gap <= 1e-12,
        format!("worst relative gap {worst:.2e} (<= 1e-8), |F(2,1) - 4/3| {gap:.2e} (<= 1e-12)"),
    )
}

fn divisor_classics() -> Outcome {
    let m11 = moment_series(c(1.0), c(1.0), Truncation::Infinite, 1e-11).map_err(err)?.value;
    let m22 = moment_series(c(2.0), c(2.0), Truncation::Infinite, 1e-11).map_err(err)?.value;
    let e11 = (m11 - zeta2()).norm();
    let e22 = (m22 - zeta2_4_over_zeta4()).norm();
    // partial sums of d(n)²/n² approach the closed form from below
    let n = 1_000_000u64;
    let d = divisor_table(2, n);
    let partial = NeumaierSum::from_iter((1..=n as usize).map(|i| d[i] * d[i] / (i as f64 * i as f64))).value();
    let lag = zeta2_4_over_zeta4() - partial;
    ensure(
        e11 <= 1e-8 && e22 <= 1e-6 && lag > 0.0 && lag < 1e-3,
        format!(
            "|M(1,1) - zeta(2)| {e11:.2e}, |M(2,2) - 5pi^4/72| {e22:.2e}, closed form - partial sum to 1e6 = {lag:.2e}"
        ),
    )
}

fn shifted_ratio_envelope() -> Outcome {
    let k = 200.0f64;
    let (lk, llk) = (k.ln(), k.ln().ln());
    let c0 = mertens_c0();
    let mut worst = f64::NEG_INFINITY;
    for r in 1..=14 {
        let r = r as f64;
        let q = ratio_shifted(k, r, 1e-12).map_err(err)?;
        let dev = (q.log_ratio + r * r * (llk + c0) / k).abs();
        let envelope = 10.0 * (r * r / (k * lk.sqrt()) + r.powi(4) / (k * k));
        worst = worst.max(dev / envelope);
    }
    ensure(worst <= 1.0, format!("worst deviation / envelope = {worst:.3}"))
}

fn random_model_moments() -> Outcome {
    let model = Model::new(ModelConfig::new(10.0, 100_000, 42).map_err(err)?).map_err(err)?;
    let logs = model.log_values();
    let m11 = moment_from_logs(&logs, c(1.0), c(1.0));
    let m10 = moment_from_logs(&logs, c(1.0), c(0.0));
    let m22 = moment_from_logs(&logs, c(2.0), c(2.0));
    let oracle22 = moment_series(c(2.0), c(2.0), Truncation::Finite(10.0), 1e-14).map_err(err)?.value;
    let s11 = (m11.estimate - 1225.0 / 768.0).norm() / m11.std_err;
    let s10 = (m10.estimate - 1.0).norm() / m10.std_err;
    let s22 = (m22.estimate - oracle22).norm() / m22.std_err;
    ensure(
        s11 <= 3.0 && s10 <= 3.0 && s22 <= 4.0,
        format!("deviations in std errors: (1,1) {s11:.2} <= 3, (1,0) {s10:.2} <= 3, (2,2) {s22:.2} <= 4"),
    )
}

fn hard_argument_bound() -> Outcome {
    let s = argument_scan(ModelConfig::new(1e4, 1_000_000, 42).map_err(err)?).map_err(err)?;
    ensure(
        s.samples == 1_000_000 && s.arg_violations == 0 && s.deficit_violations == 0,
        format!(
            "{} samples, max |arg| {:.4} vs P_y {:.4}, violations {} + {}, worst margin {:.2e}",
            s.samples, s.max_abs_arg, s.p_y, s.arg_violations, s.deficit_violations, s.worst_margin
        ),
    )
}

/// Plain bisection for `Σ atan2(sin ψ, p − cos ψ) = θ` to width 1e−12.
fn psi_oracle(theta: f64, primes: &[u64]) -> f64 {
    let g = |psi: f64| -> f64 { primes.iter().map(|&p| psi.sin().atan2(p as f64 - psi.cos())).sum::<f64>() - theta };
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn psi_solver() -> Outcome {
    let (theta, y) = (0.3, 100.0);
    let sol = solve_psi(theta, y, 1e-13).map_err(err)?;
    let p_y = py(y).map_err(err)?;
    let table = edgezeta::arith::PrimeTable::shared(100);
    let primes = table.up_to(y);
    let oracle = psi_oracle(theta, primes);
    // deficit straight from the complex factors
    let l: f64 = primes
        .iter()
        .map(|&p| {
            let p = p as f64;
            -(c(1.0) - Complex64::from_polar(1.0 / p, oracle)).norm().ln() + (1.0 - 1.0 / p).ln()
        })
        .sum();
    let centre = theta / p_y;
    let in_window = sol.psi >= centre * (1.0 - 2.0 / p_y) && sol.psi <= centre * (1.0 + 2.0 / p_y);
    let l_gap = (sol.l + theta * theta / (2.0 * p_y)).abs();
    let l_bound = 5.0 * theta * theta / (p_y * p_y);
    let psi_gap = (sol.psi - oracle).abs();
    let oracle_l_gap = (sol.l - l).abs();
    ensure(
        in_window && l_gap <= l_bound && psi_gap <= 1e-10 && oracle_l_gap <= 1e-12,
        format!(
            "psi {:.12} (window {:.6}..{:.6}), |psi - bisection| {psi_gap:.1e}, |L + theta^2/2P| {l_gap:.2e} <= {l_bound:.2e}, |L - direct| {oracle_l_gap:.1e}",
            sol.psi,
            centre * (1.0 - 2.0 / p_y),
            centre * (1.0 + 2.0 / p_y)
        ),
    )
}

fn grid_moments() -> Outcome {
    let g = scan(1e4, 200_000, 1e3).map_err(err)?;
    let m11 = moment_integral(&g, c(1.0), c(1.0)).re;
    let m22 = moment_integral(&g, c(2.0), c(2.0)).re;
    let r11 = (m11 / zeta2() - 1.0).abs();
    let r22 = (m22 / 6.7646 - 1.0).abs();
    ensure(
        r11 <= 0.02 && r22 <= 0.05,
        format!(
            "I(1,1) = {m11:.5} ({:.2}% off, <= 2%), I(2,2) = {m22:.4} ({:.2}% off, <= 5%)",
            100.0 * r11,
            100.0 * r22
        ),
    )
}

fn rotated_bracketing() -> Outcome {
    let (t, n, y) = (1e4, 200_000, 50.0);
    let psi = solve_psi(0.3, y, 1e-13).map_err(err)?.psi;
    let mut lines = Vec::new();
    let mut ok = true;
    for rot in [0.0, psi] {
        for k in [2u32, 4, 8] {
            let m = rotated_moment(t, n, y, rot, k).map_err(err)?;
            let r = m.ratio();
            ok &= r >= 0.9 && r <= 1.1 * (k + 2) as f64;
            lines.push(format!("psi={rot:.4} k={k}: I/central {r:.6}"));
        }
    }
    ensure(ok, lines.join(", "))
}

fn torus_measures() -> Outcome {
    let (lo, hi, a, b) = (1e3, 2e3 + 0.25, 0.13, 0.61);
    let swept = box_measure_on(lo, hi, 2.0, &BoxSpec::new(vec![(a, b)]).map_err(err)?).map_err(err)?.measure;
    let closed = single_prime_closed_form(2, a, b, lo, hi);
    let single_gap = (swept - closed).abs();
    let t = 1e6;
    let quarter = box_measure(t, 3.0, &BoxSpec::uniform(2, 0.0, 0.5).map_err(err)?).map_err(err)?;
    let density_gap = (quarter.measure / t - 0.25).abs();
    let left = box_measure(t, 3.0, &BoxSpec::new(vec![(0.0, 0.2), (0.0, 0.5)]).map_err(err)?).map_err(err)?;
    let right = box_measure(t, 3.0, &BoxSpec::new(vec![(0.2, 0.5), (0.0, 0.5)]).map_err(err)?).map_err(err)?;
    let split_gap = (left.measure + right.measure - quarter.measure).abs();
    ensure(
        single_gap <= 1e-9 * hi && density_gap <= 0.01 && split_gap <= 1e-9 * t,
        format!(
            "single prime |sweep - closed form| {single_gap:.1e}, |measure/T - 1/4| {density_gap:.2e}, split gap {split_gap:.1e} ({} breakpoints)",
            quarter.breakpoints
        ),
    )
}

fn toy_lattice() -> Outcome {
    let m = min_linear_form(2, 1).map_err(err)?;
    let gap = (m.min_value() - 1.5f64.ln()).abs();
    let (n, l) = (3usize, 5i64);
    let logs = prime_logs(n).map_err(err)?;
    let full = min_linear_form(n, l as u32).map_err(err)?;
    // reverse nesting and reverse direction of every coordinate
    let mut best: Option<(DoubleDouble, Vec<i64>)> = None;
    for c3 in (-l..=l).rev() {
        for c2 in (-l..=l).rev() {
            for c1 in (-l..=l).rev() {
                if (c1, c2, c3) == (0, 0, 0) {
                    continue;
                }
                let v = linear_form(&logs, &[c1, c2, c3]).abs();
                if best.as_ref().is_none_or(|(bv, _)| v.total_cmp(bv).is_lt()) {
                    best = Some((v, vec![c1, c2, c3]));
                }
            }
        }
    }
    let (v, w) = best.expect("non-empty box");
    let flipped: Vec<i64> = w.iter().map(|x| -x).collect();
    let same = v == full.value && (full.witness == w || full.witness == flipped);
    ensure(
        gap <= 1e-15 && m.witness == [-1, 1] && same,
        format!(
            "N=2 L=1: |min - log 3/2| {gap:.1e}, witness {:?}; N=3 L=5: {:.17e} at {:?}, re-enumeration {:.17e} at {w:?}",
            m.witness,
            full.min_value(),
            full.witness,
            v.to_f64()
        ),
    )
}

fn dirichlet_anchors() -> Outcome {
    let l3 = l1_all(&build_table(3).map_err(err)?);
    let l5 = l1_all(&build_table(5).map_err(err)?);
    let e3 = (l3.get(l3.quadratic_exponent()) - PI / (3.0 * 3f64.sqrt())).norm();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let e5 = (l5.get(l5.quadratic_exponent()) - 2.0 / 5f64.sqrt() * golden.ln()).norm();
    let mut pairing = 0.0f64;
    for q in (3..=100u64).filter(|&q| edgezeta::arith::is_prime(q)) {
        let t = build_table(q).map_err(err)?;
        let l = l1_all(&t);
        let n = t.order();
        for e in 1..n {
            pairing = pairing.max((l.get(e) - l.get(n - e).conj()).norm());
        }
    }
    let q = 10007u64;
    let l = l1_all(&build_table(q).map_err(err)?);
    let mean = NeumaierSum::from_iter(l.values().iter().map(|v| v.norm_sqr())).value() / l.len() as f64;
    let expected = zeta2() * (1.0 - 1.0 / (q * q) as f64);
    let mean_gap = (mean / expected - 1.0).abs();
    ensure(
        e3 <= 1e-9 && e5 <= 1e-9 && pairing <= 1e-12 && mean_gap <= 0.01,
        format!(
            "q=3 error {e3:.1e}, q=5 error {e5:.1e}, worst pairing gap (q<=100) {pairing:.1e}, mean |L|^2 mod 10007 off by {:.3}%",
            100.0 * mean_gap
        ),
    )
}

fn characteristic_function() -> Outcome {
    let k = 10f64.exp();
    let mut ok = true;
    let mut lines = Vec::new();
    for eta in [0.1, 0.5, 1.0] {
        let chk = char_function_check(k, eta, 1e-5).map_err(err)?;
        let bound = 0.12 * eta * eta;
        ok &= chk.deviation() <= bound;
        lines.push(format!("eta={eta}: {:.2e} <= {bound:.2e}", chk.deviation()));
    }
    let grid = scan(1e6, 1_000_000, 1e3).map_err(err)?;
    let mut ks = Vec::new();
    for tau in [1.8, 2.1, 2.4] {
        let r = arg_normality_on_grid(&grid, tau).map_err(err)?;
        lines.push(format!("tau={tau}: KS {:.4} on {} points", r.ks_distance, r.sample_count));
        ks.push(r.ks_distance);
    }
    ok &= ks.windows(2).all(|w| w[1] < w[0]);
    ensure(ok, lines.join(", "))
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_edgezeta")
}

fn run_cli(args: &[&str], threads: usize, out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(binary())
        .args(args)
        .args(["--threads", &threads.to_string(), "--out"])
        .arg(out)
        .env_remove("EDGEZETA_CACHE")
        .output()
        .map_err(err)?;
    if !status.status.success() {
        return Err(format!(
            "{args:?} exited with {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr)
        ));
    }
    std::fs::read(out).map_err(err)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let runs: [&[&str]; 7] = [
        &["--command", "moments", "--z1", "2", "--z2", "2", "--y", "10", "--n-samples", "100000", "--seed", "42"],
        &["--command", "tail", "--tau", "1.5", "--theta", "0.1", "--y", "1000", "--n-samples", "50000", "--seed", "7"],
        &["--command", "scan", "--T", "10000", "--n-points", "20000", "--y", "1000", "--format", "csv"],
        &["--command", "torus", "--T", "1000000", "--y", "3"],
        &["--command", "dirichlet", "--q", "10007", "--format", "csv"],
        &["--command", "normality", "--T", "100000", "--tau", "1.8", "--y", "1000", "--n-points", "200000"],
        &["--command", "verify", "--seed", "42", "--n-samples", "100000"],
    ];
    let mut compared = 0;
    for (i, args) in runs.iter().enumerate() {
        let mut reference: Option<Vec<u8>> = None;
        for threads in [1usize, 2, 4] {
            let path = dir.path().join(format!("run{i}-{threads}.out"));
            let bytes = run_cli(args, threads, &path)?;
            let side = edgezeta_companion(&path);
            let bytes = match std::fs::read(&side) {
                Ok(extra) => [bytes, extra].concat(),
                Err(_) => bytes,
            };
            match &reference {
                None => reference = Some(bytes),
                Some(r) if *r == bytes => compared += 1,
                Some(_) => return Err(format!("{:?} differs between 1 and {threads} threads", args[1])),
            }
        }
    }
    Ok(format!("{} commands x threads {{1,2,4}}: {compared} byte-identical repeats", runs.len()))
}

fn edgezeta_companion(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".config.json");
    name.into()
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let _ = Constants::get();
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "local factor circle identity", limit: secs(5), run: local_factor_identity },
        Criterion { id: 2, name: "divisor-series classics", limit: secs(5), run: divisor_classics },
        Criterion { id: 3, name: "shifted-ratio envelope", limit: secs(30), run: shifted_ratio_envelope },
        Criterion { id: 4, name: "random-model moment identity", limit: secs(60), run: random_model_moments },
        Criterion { id: 5, name: "hard argument bound", limit: secs(120), run: hard_argument_bound },
        Criterion { id: 6, name: "rotation angle solver", limit: secs(1), run: psi_solver },
        Criterion { id: 7, name: "grid moments on the 1-line", limit: secs(120), run: grid_moments },
        Criterion { id: 8, name: "rotated moment bracketing", limit: secs(120), run: rotated_bracketing },
        Criterion { id: 9, name: "torus box measures", limit: secs(60), run: torus_measures },
        Criterion { id: 10, name: "toy linear-form lattice", limit: secs(10), run: toy_lattice },
        Criterion { id: 11, name: "Dirichlet L(1, chi) anchors", limit: secs(120), run: dirichlet_anchors },
        Criterion {
            id: 12,
            name: "characteristic function and argument normality",
            limit: secs(600),
            run: characteristic_function,
        },
        Criterion { id: 13, name: "thread-count determinism", limit: secs(600), run: determinism },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.iter().any(|f| c.id.to_string() == *f)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let (pass, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        println!(
            "criterion {:>2} {} {}: {} [{:.2} s, limit {} s{}]",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
        if !pass {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all selected criteria passed");
}
