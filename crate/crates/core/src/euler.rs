//! Truncated and rotated Euler products on the line `Re s = 1`, a direct evaluator
//! for `ζ(1+it)`, and the rotation solver used by the tail estimates.
//!
//! The argument of a product is the sum of principal per-factor arguments; it is not
//! tracked continuously in `t`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{bernoulli_over_factorial, PrimeTable};
use crate::error::{domain, Error, Result};
use crate::reduce::{par_map, ComplexSum, NeumaierSum};

fn check_y(y: f64) -> Result<()> {
    if !(y >= 2.0) {
        return domain(format!("Euler products need y >= 2, got {y}"));
    }
    Ok(())
}

/// `R_y = ∏_{p≤y} (1 − 1/p)^{−1}`.
pub fn ry(y: f64) -> Result<f64> {
    Ok(py(y)?.exp())
}

/// `P_y = log R_y`, summed with compensation.
pub fn py(y: f64) -> Result<f64> {
    check_y(y)?;
    let table = PrimeTable::shared(y as u64);
    let acc: NeumaierSum = table.up_to(y).iter().map(|&p| -(-1.0 / p as f64).ln_1p()).collect();
    Ok(acc.value())
}

/// A product `∏_{p≤y} (1 − e^{−iψ} p^{−1−it})^{−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedProduct {
    pub y: f64,
    pub t: f64,
    pub psi: f64,
    pub log_value: Complex64,
    pub value: Complex64,
}

impl TruncatedProduct {
    /// Principal-branch argument, `Im log_value`.
    pub fn arg(&self) -> f64 {
        self.log_value.im
    }
}

/// `−log(1 − e^{−iφ}/p)` with `φ = t log p + ψ`.
#[inline]
fn factor_log(inv_p: f64, phi: f64) -> Complex64 {
    let (s, c) = phi.sin_cos();
    let re = -0.5 * (inv_p * (inv_p - 2.0 * c)).ln_1p();
    let im = -(s * inv_p).atan2(1.0 - c * inv_p);
    Complex64::new(re, im)
}

/// Precomputed primes and logarithms for repeated evaluation at one `y`.
#[derive(Debug, Clone)]
pub struct EulerProduct {
    y: f64,
    inv_p: Vec<f64>,
    log_p: Vec<f64>,
    _table: Arc<PrimeTable>,
}

impl EulerProduct {
    pub fn new(y: f64) -> Result<Self> {
        check_y(y)?;
        let table = PrimeTable::shared(y as u64);
        let primes = table.up_to(y);
        Ok(Self {
            y,
            inv_p: primes.iter().map(|&p| 1.0 / p as f64).collect(),
            log_p: primes.iter().map(|&p| (p as f64).ln()).collect(),
            _table: table,
        })
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn prime_count(&self) -> usize {
        self.inv_p.len()
    }

    pub fn eval(&self, t: f64, psi: f64) -> TruncatedProduct {
        let mut acc = ComplexSum::new();
        for (&inv_p, &log_p) in self.inv_p.iter().zip(&self.log_p) {
            acc += factor_log(inv_p, t * log_p + psi);
        }
        let log_value = acc.value();
        TruncatedProduct { y: self.y, t, psi, log_value, value: log_value.exp() }
    }

    /// Evaluates on a grid of `t` in parallel; output order follows `ts`.
    pub fn eval_grid(&self, ts: &[f64], psi: f64) -> Vec<TruncatedProduct> {
        par_map(ts.len(), |i| self.eval(ts[i], psi))
    }
}

/// `ζ(1+it, y) = ∏_{p≤y} (1 − p^{−1−it})^{−1}`.
pub fn zeta_trunc(t: f64, y: f64) -> Result<TruncatedProduct> {
    rotated_trunc(t, y, 0.0)
}

/// `L_ψ(1+it, y) = ∏_{p≤y} (1 − e^{−iψ} p^{−1−it})^{−1}`.
pub fn rotated_trunc(t: f64, y: f64, psi: f64) -> Result<TruncatedProduct> {
    Ok(EulerProduct::new(y)?.eval(t, psi))
}

/// Smallest `|1 − 2^{−it}|` at which the alternating series is still divided out.
const ETA_DENOMINATOR_FLOOR: f64 = 1e-6;

/// Both evaluations of `ζ(1+it)` made by [`zeta_line`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaLine {
    pub value: Complex64,
    /// The independent second evaluation.
    pub check: Complex64,
    pub discrepancy: f64,
}

/// `ζ(1+it)` to absolute accuracy `tol`.
///
/// The primary route is the alternating series for `η(1+it)` with Cohen–Villegas–Zagier
/// acceleration, divided by `1 − 2^{−it}`. It is checked against an Euler–Maclaurin
/// evaluation. Near zeros of `1 − 2^{−it}` the alternating route is unusable and
/// two Euler–Maclaurin evaluations at different cutoffs are compared instead.
pub fn zeta_line(t: f64, tol: f64) -> Result<Complex64> {
    Ok(zeta_line_checked(t, tol)?.value)
}

pub fn zeta_line_checked(t: f64, tol: f64) -> Result<ZetaLine> {
    if !t.is_finite() || t.abs() < 0.5 {
        return domain(format!("zeta_line needs |t| >= 0.5 (pole at t = 0), got {t}"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let s = Complex64::new(1.0, t);
    let denom = Complex64::new(1.0, 0.0) - Complex64::new(0.0, -t * 2f64.ln()).exp();
    let (value, check) = if denom.norm() >= ETA_DENOMINATOR_FLOOR {
        let eta = eta_cvz(s, tol * denom.norm() / 4.0);
        (eta / denom, zeta_euler_maclaurin(s, tol / 4.0, 1.0))
    } else {
        log::warn!("1 - 2^(-it) vanishes near t = {t}; comparing two Euler-Maclaurin cutoffs");
        (zeta_euler_maclaurin(s, tol / 4.0, 1.0), zeta_euler_maclaurin(s, tol / 4.0, 1.5))
    };
    let discrepancy = (value - check).norm();
    if discrepancy > 10.0 * tol {
        return Err(Error::Consistency(format!("zeta(1+it) evaluations disagree by {discrepancy:.3e} at t = {t}")));
    }
    if discrepancy > 2.0 * tol {
        log::warn!("zeta(1+it) evaluations differ by {discrepancy:.3e} at t = {t} (tol {tol:.1e})");
    }
    Ok(ZetaLine { value, check, discrepancy })
}

/// `η(s) = Σ_{n≥1} (−1)^{n−1} n^{−s}` by the Cohen–Villegas–Zagier weights.
///
/// The weights are formed in log space, so large `|t|` does not overflow.
fn eta_cvz(s: Complex64, tol: f64) -> Complex64 {
    let t = s.im.abs();
    let ln_rate = (3.0 + 8f64.sqrt()).ln();
    let n = (((PI * t + (3.0 * (1.0 + 2.0 * t) / tol).ln()) / ln_rate).ceil() as usize).max(4);
    let nf = n as f64;
    // log of (n+i−1)! 4^i / ((n−i)! (2i)!), by the ratio of successive terms
    let mut log_e = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    log_e.push(0.0);
    for i in 1..=n {
        let fi = i as f64;
        acc += ((nf + fi - 1.0) * (nf - fi + 1.0) * 4.0 / ((2.0 * fi - 1.0) * 2.0 * fi)).ln();
        log_e.push(acc);
    }
    let peak = log_e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = log_e.iter().map(|&l| (l - peak).exp()).collect();
    // 1 − d_k/d_n = Σ_{i>k} e_i / Σ_i e_i
    let mut upper = vec![0.0f64; n + 1];
    let mut run = NeumaierSum::new();
    for k in (0..n).rev() {
        run += e[k + 1];
        upper[k] = run.value();
    }
    let total = {
        let mut all = run;
        all += e[0];
        all.value()
    };
    let mut sum = ComplexSum::new();
    for k in (0..n).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = (-s * ((k + 1) as f64).ln()).exp();
        sum += term * (sign * upper[k] / total);
    }
    sum.value()
}

/// Euler–Maclaurin `ζ(s)` for `Re s = 1`, cutoff `N ≈ scale · 2(|t|+40)/π`.
fn zeta_euler_maclaurin(s: Complex64, tol: f64, scale: f64) -> Complex64 {
    let coeffs = bernoulli_over_factorial();
    let n = ((scale * 2.0 * (s.im.abs() + 40.0) / PI).ceil() as u64).max(10);
    let nf = n as f64;
    let mut acc = ComplexSum::new();
    for m in (1..n).rev() {
        acc += (-s * (m as f64).ln()).exp();
    }
    let n_s = (-s * nf.ln()).exp();
    acc += n_s * nf / (s - 1.0);
    acc += n_s * 0.5;
    let mut rising = s * n_s / nf;
    for (j, &c) in coeffs.iter().enumerate() {
        let term = rising * c;
        acc += term;
        if term.norm() <= tol * 1e-3 {
            break;
        }
        rising = rising * (s + (2 * j + 1) as f64) * (s + (2 * j + 2) as f64) / (nf * nf);
    }
    acc.value()
}

/// The two sides of the rotation equivalence at `ψ = θ / log log y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationResiduals {
    /// `|L_ψ(1+it,y)/R_y − 1|`.
    pub lhs: f64,
    /// `|ζ(1+it,y) e^{−iθ}/R_y − 1|`.
    pub rhs: f64,
}

pub fn rotation_residuals(t: f64, y: f64, theta: f64) -> Result<RotationResiduals> {
    EulerProduct::new(y).and_then(|e| rotation_residuals_with(&e, t, theta))
}

/// [`rotation_residuals`] reusing precomputed primes.
pub fn rotation_residuals_with(euler: &EulerProduct, t: f64, theta: f64) -> Result<RotationResiduals> {
    let y = euler.y();
    if !(y >= 16.0) {
        return domain(format!("rotation residuals need y >= 16, got {y}"));
    }
    let r_y = ry(y)?;
    let psi = theta / y.ln().ln();
    let rotated = euler.eval(t, psi).value;
    let plain = euler.eval(t, 0.0).value;
    let lhs = (rotated / r_y - 1.0).norm();
    let rhs = (plain * Complex64::new(0.0, -theta).exp() / r_y - 1.0).norm();
    Ok(RotationResiduals { lhs, rhs })
}

/// The rotation with `arg ∏(1 − e^{iψ}/p)^{−1} = θ` and its modulus deficit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiSolution {
    pub theta: f64,
    pub y: f64,
    pub psi: f64,
    /// `log|∏(1 − e^{iψ}/p)^{−1}| − P_y`.
    pub l: f64,
}

/// `(θ(ψ), θ'(ψ))` with `θ(ψ) = Σ_p Σ_k sin(kψ)/(k p^k) = Σ_p atan2(sin ψ, p − cos ψ)`.
fn theta_of_psi(primes: &[u64], psi: f64) -> (f64, f64) {
    let (s, c) = psi.sin_cos();
    let mut value = NeumaierSum::new();
    let mut slope = NeumaierSum::new();
    for &p in primes {
        let p = p as f64;
        value += s.atan2(p - c);
        slope += (p * c - 1.0) / (p * p - 2.0 * p * c + 1.0);
    }
    (value.value(), slope.value())
}

/// `L(ψ) = Σ_p Σ_k (cos(kψ) − 1)/(k p^k)`, written without cancellation as
/// `−½ Σ_p log(1 + 4 sin²(ψ/2) / (p (1 − 1/p)²))`.
fn deficit(primes: &[u64], psi: f64) -> f64 {
    let h = (0.5 * psi).sin();
    let h2 = 4.0 * h * h;
    let acc: NeumaierSum = primes
        .iter()
        .map(|&p| {
            let p = p as f64;
            let q = 1.0 - 1.0 / p;
            -0.5 * (h2 / (p * q * q)).ln_1p()
        })
        .collect();
    acc.value()
}

/// Solves `θ = Σ_{p≤y} Σ_k sin(kψ)/(k p^k)` by bisection on `[0, π/4]·sign θ`,
/// where the map is strictly increasing, followed by one Newton step.
pub fn solve_psi(theta: f64, y: f64, tol: f64) -> Result<PsiSolution> {
    if !(theta.abs() <= 1.0) {
        return domain(format!("solve_psi needs |theta| <= 1, got {theta}"));
    }
    if !(y >= 16.0) {
        return domain(format!("solve_psi needs y >= 16, got {y}"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    if theta == 0.0 {
        return Ok(PsiSolution { theta, y, psi: 0.0, l: 0.0 });
    }
    let table = PrimeTable::shared(y as u64);
    let primes = table.up_to(y);
    let sign = theta.signum();
    let target = theta.abs();
    let (mut lo, mut hi) = (0.0f64, PI / 4.0);
    if theta_of_psi(primes, hi).0 < target {
        return domain(format!("no rotation in [0, pi/4] reaches theta = {theta} at y = {y}"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if theta_of_psi(primes, mid).0 < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let (v, d) = theta_of_psi(primes, mid);
    let newton = mid - (v - target) / d;
    let psi_abs = if newton >= lo && newton <= hi { newton } else { mid };
    let psi = sign * psi_abs;
    Ok(PsiSolution { theta, y, psi, l: deficit(primes, psi) })
}
