use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::reduce::NeumaierSum;

use super::primes::mobius;

/// Bernoulli numbers `B_2, B_4, …, B_32` as exact rationals.
const BERNOULLI_EVEN: [(f64, f64); 16] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
];

/// `B_{2j} / (2j)!` for `j = 1..=16`.
pub(crate) fn bernoulli_over_factorial() -> [f64; 16] {
    let mut out = [0.0; 16];
    let mut fact = 1.0;
    for (j, slot) in out.iter_mut().enumerate() {
        let m = 2 * (j + 1);
        fact *= ((m - 1) * m) as f64;
        let (num, den) = BERNOULLI_EVEN[j];
        *slot = num / den / fact;
    }
    out
}

/// Euler–Maclaurin evaluation of `ζ(s) − [skip_one]` for real `s > 1`.
///
/// The first omitted correction term bounds the remainder for real `s`, so the
/// loop stops once that term is below `tol`. Returns the value and the bound.
fn zeta_euler_maclaurin(s: f64, tol: f64, skip_one: bool) -> (f64, f64) {
    let coeffs = bernoulli_over_factorial();
    // keeps consecutive correction terms shrinking by at least 4x up to j = 16
    let n = (((s + 34.0) / PI).ceil() as u64 + 1).max(10);
    let nf = n as f64;
    let mut acc = NeumaierSum::new();
    for m in (if skip_one { 2 } else { 1 }..n).rev() {
        acc += (m as f64).powf(-s);
    }
    let n_s = nf.powf(-s);
    acc += nf * n_s / (s - 1.0);
    acc += 0.5 * n_s;
    // rising product s(s+1)…(s+2j−2) times N^{−s−2j+1}
    let mut rising = s * n_s / nf;
    let mut bound = f64::INFINITY;
    for j in 0..coeffs.len() {
        let term = coeffs[j] * rising;
        if j + 1 < coeffs.len() {
            let next_rising = rising * (s + (2 * j + 1) as f64) * (s + (2 * j + 2) as f64) / (nf * nf);
            let next = (coeffs[j + 1] * next_rising).abs();
            acc += term;
            bound = next;
            rising = next_rising;
            if next <= tol {
                break;
            }
        } else {
            acc += term;
        }
    }
    (acc.value(), bound)
}

/// `ζ(s)` for real `s > 1` with a proven truncation bound of `tol`.
pub fn zeta_real(s: f64, tol: f64) -> Result<f64> {
    if !(s > 1.0) {
        return domain(format!("zeta_real needs s > 1 (pole at s = 1), got {s}"));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    Ok(zeta_euler_maclaurin(s, tol, false).0)
}

/// `ζ(s) − 1` to full relative precision, for real `s ≥ 2`.
pub fn zeta_minus_one(s: f64) -> f64 {
    debug_assert!(s >= 2.0);
    if s > 60.0 {
        // 2^{-s} + 3^{-s} + … with the rest below one ulp
        let mut acc = NeumaierSum::new();
        for n in (2..12u32).rev() {
            acc += (n as f64).powf(-s);
        }
        return acc.value();
    }
    zeta_euler_maclaurin(s, 2f64.powf(-s) * 1e-18, true).0
}

/// Prime zeta function `P(s) = Σ_p p^{−s}` for real `s ≥ 2`, via
/// `P(s) = Σ_n μ(n)/n · log ζ(ns)`.
pub fn prime_zeta(s: f64) -> f64 {
    debug_assert!(s >= 2.0);
    let mut acc = NeumaierSum::new();
    let mut n = 1u64;
    loop {
        let mu = mobius(n);
        if mu != 0 {
            acc += mu as f64 / n as f64 * zeta_minus_one(n as f64 * s).ln_1p();
        }
        // |log ζ(ns)| ≤ 2^{1−ns}
        if (1.0 - (n + 1) as f64 * s).exp2() < (-s).exp2() * 1e-19 {
            break;
        }
        n += 1;
    }
    acc.value()
}

/// `Σ_{p > P} p^{−s}` given the complete list of primes up to `P`.
pub fn prime_zeta_tail(s: f64, primes_upto_p: &[u64]) -> f64 {
    let head: NeumaierSum = primes_upto_p.iter().rev().map(|&p| (p as f64).powf(-s)).collect();
    (prime_zeta(s) - head.value()).max(0.0)
}

/// `log I₀(t)` for `t ≥ 0`: power series up to 20, the large-argument expansion beyond.
pub fn log_bessel_i0(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("log_bessel_i0 needs t >= 0, got {t}"));
    }
    if t.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if t <= 20.0 {
        // I₀(t) − 1 = Σ_{n≥1} (t²/4)^n / n!²
        let q = t * t / 4.0;
        let mut term = 1.0;
        let mut acc = NeumaierSum::new();
        let mut n = 1.0;
        loop {
            term *= q / (n * n);
            acc += term;
            if term <= 1e-18 * (1.0 + acc.value()) {
                break;
            }
            n += 1.0;
        }
        return Ok(acc.value().ln_1p());
    }
    // I₀(t) ~ e^t / √(2πt) · Σ_n ((2n−1)!!)² / (n! (8t)^n)
    let mut term = 1.0;
    let mut acc = NeumaierSum::new();
    acc += 1.0;
    let mut n: f64 = 1.0;
    loop {
        let next = term * (2.0 * n - 1.0).powi(2) / (8.0 * n * t);
        if next >= term || next < 1e-18 {
            if next < term {
                acc += next;
            }
            break;
        }
        acc += next;
        term = next;
        n += 1.0;
    }
    Ok(t - 0.5 * (2.0 * PI * t).ln() + acc.value().ln())
}

/// Digamma `ψ(x)` for `x > 0`: upward recurrence to `x ≥ 10` then the asymptotic series.
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut shift = NeumaierSum::new();
    while x < 10.0 {
        shift += -1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Σ B_{2k}/(2k x^{2k}) for k = 1..7, Horner in x^{-2}
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    shift += x.ln() - 0.5 / x - series;
    shift.value()
}
