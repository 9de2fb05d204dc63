//! Complex-order divisor functions `d_z(n)` and the Euler products built from them.
//!
//! `d_z` is the multiplicative function with `d_z(p^a) = z(z+1)…(z+a−1)/a!`, the
//! coefficients of `ζ(s)^z`. The moment series `Σ d_{z1}(n) d_{z2}(n)/n²` factor as
//! products of [`LocalFactor`]s over primes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::arith::{factorize, prime_zeta_tail, Constants, PrimeTable};
use crate::error::{domain, Error, Result};
use crate::reduce::{par_chunks, tree_reduce, NeumaierSum};

/// Largest number of series terms tried for a single local factor.
const MAX_TERMS: usize = 50_000_000;

/// Largest prime cutoff an infinite product may request.
pub const MAX_PRODUCT_CUTOFF: f64 = 2.5e8;

/// A complex divisor order `z`, always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorOrder(Complex64);

impl DivisorOrder {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return domain(format!("divisor order must be finite, got {z}"));
        }
        Ok(Self(z))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl From<DivisorOrder> for Complex64 {
    fn from(z: DivisorOrder) -> Self {
        z.0
    }
}

impl fmt::Display for DivisorOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im < 0.0 {
            write!(f, "{}-{}i", self.0.re, -self.0.im)
        } else {
            write!(f, "{}+{}i", self.0.re, self.0.im)
        }
    }
}

/// Parses `"a"`, `"bi"`, `"a+bi"` and `"a-bi"` (also with `j`).
impl FromStr for DivisorOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Domain(format!("cannot parse complex number {s:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        let re_im = if let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) {
            // split at the last sign that is not an exponent sign or the leading sign
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
            match split {
                Some(i) => {
                    let re: f64 = body[..i].parse().map_err(|_| bad())?;
                    let im_txt = &body[i..];
                    let im = match im_txt {
                        "+" => 1.0,
                        "-" => -1.0,
                        t => t.parse().map_err(|_| bad())?,
                    };
                    (re, im)
                }
                None => {
                    let im = match body {
                        "" | "+" => 1.0,
                        "-" => -1.0,
                        t => t.parse().map_err(|_| bad())?,
                    };
                    (0.0, im)
                }
            }
        } else {
            (s.parse().map_err(|_| bad())?, 0.0)
        };
        DivisorOrder::new(Complex64::new(re_im.0, re_im.1))
    }
}

/// `d_z(p^a) = ∏_{j<a} (z+j)/(j+1)`; no Γ evaluation, so non-positive integers are fine.
pub fn dz_prime_power(z: Complex64, a: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 0..a {
        acc = acc * (z + j as f64) / (j + 1) as f64;
    }
    acc
}

/// `d_z(n)` by factorising `n`.
pub fn dz(n: u64, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return domain("d_z(n) needs n >= 1");
    }
    Ok(factorize(n).into_iter().fold(Complex64::new(1.0, 0.0), |acc, (_, a)| acc * dz_prime_power(z, a)))
}

/// How a local factor was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorPath {
    /// Direct complex series.
    Series,
    /// Series of positive terms summed in log space (real positive orders).
    LogSeries,
    /// Periodic trapezoid rule on the circle integral.
    Quadrature,
}

/// `Σ_{a≥0} d_{z1}(p^a) d_{z2}(p^a) p^{−2a}` with truncation metadata.
///
/// `tail_bound` is relative: the neglected part is at most `tail_bound · |value|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFactor {
    pub p: u64,
    pub z1: Complex64,
    pub z2: Complex64,
    pub value: Complex64,
    pub log_value: Complex64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub path: FactorPath,
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

fn check_prime(p: u64) -> Result<()> {
    if p < 2 {
        return domain(format!("local factors are indexed by primes, got {p}"));
    }
    Ok(())
}

/// Bound on `|t_{a+1}/t_a|` valid for every index `≥ a`; non-increasing in `a`.
#[inline]
fn ratio_bound(m1: f64, m2: f64, a: f64, x: f64) -> f64 {
    (m1 + a) * (m2 + a) / ((a + 1.0) * (a + 1.0)) * x
}

/// Local factor, choosing the evaluation route from the orders.
///
/// Real positive orders use the log-space series, except equal orders above 1000 at
/// primes below the order, which take the circle quadrature. Everything else uses
/// the direct complex series.
pub fn local_factor(p: u64, z1: Complex64, z2: Complex64, tol: f64) -> Result<LocalFactor> {
    check_prime(p)?;
    check_tol(tol)?;
    let real_positive = z1.im == 0.0 && z2.im == 0.0 && z1.re > 0.0 && z2.re > 0.0;
    if real_positive {
        if z1 == z2 && z1.re > 1000.0 && (p as f64) < z1.re {
            return local_factor_quadrature(p, z1.re, tol);
        }
        return log_local_factor_real(p, z1.re, z2.re, tol);
    }
    local_factor_series(p, z1, z2, tol)
}

/// Direct complex series, truncated once the geometric tail bound drops below `tol`.
pub fn local_factor_series(p: u64, z1: Complex64, z2: Complex64, tol: f64) -> Result<LocalFactor> {
    check_prime(p)?;
    check_tol(tol)?;
    let f = series_factor(p, z1, z2, tol);
    if f.tail_bound > tol {
        return Err(Error::Resource(format!("local factor at p = {p} did not converge in {MAX_TERMS} terms")));
    }
    Ok(f)
}

fn series_factor(p: u64, z1: Complex64, z2: Complex64, tol: f64) -> LocalFactor {
    let x = 1.0 / (p as f64 * p as f64);
    let (m1, m2) = (z1.norm().max(1.0), z2.norm().max(1.0));
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = crate::reduce::ComplexSum::new();
    sum += term;
    let mut a = 0usize;
    let mut tail = f64::INFINITY;
    while a < MAX_TERMS {
        let af = a as f64;
        term = term * (z1 + af) * (z2 + af) * (x / ((af + 1.0) * (af + 1.0)));
        a += 1;
        sum += term;
        let rho = ratio_bound(m1, m2, a as f64, x);
        let t = term.norm();
        if t == 0.0 {
            tail = 0.0;
            break;
        }
        if rho < 1.0 {
            let s = sum.value().norm();
            tail = t * rho / (1.0 - rho) / s.max(f64::MIN_POSITIVE);
            if tail <= tol {
                break;
            }
        }
    }
    let value = sum.value();
    LocalFactor {
        p,
        z1,
        z2,
        value,
        log_value: value.ln(),
        terms_used: a + 1,
        tail_bound: tail,
        path: FactorPath::Series,
    }
}

/// Log-space series for real orders `z1, z2 > 0`, where every term is positive.
///
/// Suitable for orders far beyond the range where the terms fit in binary64.
pub fn log_local_factor_real(p: u64, z1: f64, z2: f64, tol: f64) -> Result<LocalFactor> {
    check_prime(p)?;
    check_tol(tol)?;
    if !(z1 > 0.0 && z2 > 0.0) {
        return domain(format!("log-space series needs positive orders, got ({z1}, {z2})"));
    }
    let (log_value, terms, tail) = log_series(p, z1, z2, tol);
    if tail > tol {
        return Err(Error::Resource(format!("local factor at p = {p} did not converge in {MAX_TERMS} terms")));
    }
    Ok(LocalFactor {
        p,
        z1: Complex64::new(z1, 0.0),
        z2: Complex64::new(z2, 0.0),
        value: Complex64::new(log_value.exp(), 0.0),
        log_value: Complex64::new(log_value, 0.0),
        terms_used: terms,
        tail_bound: tail,
        path: FactorPath::LogSeries,
    })
}

/// Returns `(log value, terms, relative tail bound)`.
fn log_series(p: u64, z1: f64, z2: f64, tol: f64) -> (f64, usize, f64) {
    let x = 1.0 / (p as f64 * p as f64);
    let log_x = x.ln();
    let (m1, m2) = (z1.max(1.0), z2.max(1.0));
    let log_tol = tol.ln();
    // first pass: find the number of terms and the largest log-term; the largest term
    // is a lower bound for the sum, which makes the stopping rule conservative
    let mut lt = 0.0f64;
    let mut peak = 0.0f64;
    let mut a = 0usize;
    let mut tail = f64::INFINITY;
    while a < MAX_TERMS {
        let af = a as f64;
        lt += ((z1 + af) * (z2 + af) / ((af + 1.0) * (af + 1.0))).ln() + log_x;
        a += 1;
        peak = peak.max(lt);
        let rho = ratio_bound(m1, m2, a as f64, x);
        if rho < 1.0 {
            let log_tail = lt + (rho / (1.0 - rho)).ln() - peak;
            if log_tail <= log_tol {
                tail = log_tail.exp();
                break;
            }
        }
    }
    // second pass: the same recurrence, summed relative to the peak
    let mut acc = NeumaierSum::new();
    let mut lt = 0.0f64;
    acc += (-peak).exp();
    for j in 0..a {
        let af = j as f64;
        lt += ((z1 + af) * (z2 + af) / ((af + 1.0) * (af + 1.0))).ln() + log_x;
        acc += (lt - peak).exp();
    }
    (peak + acc.value().ln(), a + 1, tail)
}

/// Periodic trapezoid rule for `(1/2π)∫|1 − e^{iθ}/p|^{−2k} dθ`, in log space.
///
/// The node set always contains `θ = 0`, where the integrand peaks; the node count is
/// doubled until two successive estimates agree to `tol` relative.
pub fn local_factor_quadrature(p: u64, k: f64, tol: f64) -> Result<LocalFactor> {
    check_prime(p)?;
    check_tol(tol)?;
    if !(k > 0.0) {
        return domain(format!("quadrature route needs a positive order, got {k}"));
    }
    let (log_value, nodes, delta) = circle_quadrature(p, k, 0.0, tol)?;
    Ok(LocalFactor {
        p,
        z1: Complex64::new(k, 0.0),
        z2: Complex64::new(k, 0.0),
        value: Complex64::new(log_value.exp(), 0.0),
        log_value: Complex64::new(log_value, 0.0),
        terms_used: nodes,
        tail_bound: delta,
        path: FactorPath::Quadrature,
    })
}

/// `Σ_a d_{k−r}(p^a) d_{k+r}(p^a) p^{−2a}` as
/// `(1/2π)∫|1 − e^{iθ}/p|^{−2k} cos(2r·arg(1 − e^{iθ}/p)) dθ`.
pub fn shifted_factor_quadrature(p: u64, k: f64, r: f64, tol: f64) -> Result<LocalFactor> {
    check_prime(p)?;
    check_tol(tol)?;
    if !(k > 0.0) {
        return domain(format!("quadrature route needs a positive order, got {k}"));
    }
    let (log_value, nodes, delta) = circle_quadrature(p, k, r, tol)?;
    Ok(LocalFactor {
        p,
        z1: Complex64::new(k - r, 0.0),
        z2: Complex64::new(k + r, 0.0),
        value: Complex64::new(log_value.exp(), 0.0),
        log_value: Complex64::new(log_value, 0.0),
        terms_used: nodes,
        tail_bound: delta,
        path: FactorPath::Quadrature,
    })
}

fn circle_quadrature(p: u64, k: f64, r: f64, tol: f64) -> Result<(f64, usize, f64)> {
    let inv_p = 1.0 / p as f64;
    let peak = -2.0 * k * (-inv_p).ln_1p();
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let log_mod2 = (inv_p * (inv_p - 2.0 * c)).ln_1p();
        let g = -k * log_mod2 - peak;
        let w = if r == 0.0 { 1.0 } else { (2.0 * r * (-s * inv_p).atan2(1.0 - c * inv_p)).cos() };
        g.exp() * w
    };
    // average over N equally spaced nodes, using θ ↦ −θ symmetry
    let average = |n: usize| {
        let mut acc = NeumaierSum::new();
        acc += integrand(0.0);
        acc += integrand(PI);
        for j in 1..n / 2 {
            acc += 2.0 * integrand(2.0 * PI * j as f64 / n as f64);
        }
        acc.value() / n as f64
    };
    let width = (1.0 - inv_p) * (p as f64 / (2.0 * k)).sqrt();
    let mut n = ((16.0 * PI / width).ceil() as usize).next_power_of_two().max(16);
    let mut prev = average(n);
    loop {
        n *= 2;
        let next = average(n);
        let delta = ((next - prev) / next).abs();
        if delta <= tol {
            if next <= 0.0 {
                return Err(Error::Consistency(format!("circle integral at p = {p} is not positive")));
            }
            return Ok((peak + next.ln(), n, delta));
        }
        if n > 1 << 26 {
            return Err(Error::Resource(format!("circle quadrature at p = {p} did not settle")));
        }
        prev = next;
    }
}

/// Where an Euler product over primes is cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Primes `p ≤ y`.
    Finite(f64),
    /// All primes, with an explicit bound on the neglected tail.
    Infinite,
}

impl Truncation {
    /// `Finite(y)` for finite `y`, `Infinite` for `+∞`.
    pub fn from_y(y: f64) -> Self {
        if y.is_infinite() {
            Truncation::Infinite
        } else {
            Truncation::Finite(y)
        }
    }
}

/// `∏_p (local factor)`, i.e. `Σ_{n ∈ S(y)} d_{z1}(n) d_{z2}(n)/n²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSeries {
    pub value: Complex64,
    pub log_value: Complex64,
    /// Number of primes whose local factor was summed explicitly.
    pub primes_used: usize,
    /// Largest prime summed explicitly.
    pub cutoff: f64,
    /// Bound on the absolute error of `log_value`.
    pub tail_bound: f64,
}

/// Cutoff `P` beyond which `|log F_p − z1 z2/p²| ≤ (8/3) M²/p⁴`, summing to at most
/// `tol` (needs `p² ≥ 4M`, `M = max(1,|z1|)·max(1,|z2|)`).
fn infinite_cutoff(m: f64, tol: f64) -> f64 {
    let by_tail = (8.0 * m * m / (9.0 * tol)).cbrt();
    by_tail.max(2.0 * m.sqrt()).max(100.0).ceil()
}

fn remainder_bound(m: f64, cutoff: f64) -> f64 {
    8.0 * m * m / (9.0 * cutoff.powi(3))
}

/// Sum of per-prime log factors, split into fixed chunks so the order is stable.
fn sum_log_factors(primes: &[u64], f: impl Fn(u64) -> (Complex64, f64) + Sync + Send) -> (Complex64, f64) {
    let partials = par_chunks(primes.len(), |range| {
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        let mut tails = NeumaierSum::new();
        for &p in &primes[range] {
            let (l, t) = f(p);
            re += l.re;
            im += l.im;
            tails += t;
        }
        (re, im, tails)
    });
    let zero = (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
    let (re, im, tails) = tree_reduce(&partials, zero, |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    (Complex64::new(re.value(), im.value()), tails.value())
}

fn factor_log(p: u64, z1: Complex64, z2: Complex64, tol: f64) -> (Complex64, f64) {
    let real_positive = z1.im == 0.0 && z2.im == 0.0 && z1.re > 0.0 && z2.re > 0.0;
    if real_positive {
        let (l, _, t) = log_series(p, z1.re, z2.re, tol);
        (Complex64::new(l, 0.0), t)
    } else {
        let f = series_factor(p, z1, z2, tol);
        (f.log_value, f.tail_bound)
    }
}

/// `E(L(1,X,y)^{z1} conj(L(1,X,y))^{z2}) = ∏_{p≤y} Σ_a d_{z1}(p^a)d_{z2}(p^a)/p^{2a}`.
///
/// `tol` bounds the absolute error of the logarithm. For an infinite product the
/// explicit part runs to a cutoff `P`; the first-order tail `z1 z2 Σ_{p>P} p^{−2}` is
/// added from the prime zeta function and the remainder is bounded analytically.
pub fn moment_series(z1: Complex64, z2: Complex64, y: Truncation, tol: f64) -> Result<MomentSeries> {
    check_tol(tol)?;
    match y {
        Truncation::Finite(y) => {
            if !(y >= 0.0) {
                return domain(format!("truncation point must be non-negative, got {y}"));
            }
            let table = PrimeTable::shared(y.max(2.0) as u64);
            let primes = table.up_to(y);
            let per = tol / (2.0 * primes.len() as f64 + 1.0);
            let (log_value, tails) = sum_log_factors(primes, |p| factor_log(p, z1, z2, per));
            finish(log_value, primes, tails)
        }
        Truncation::Infinite => {
            let m = z1.norm().max(1.0) * z2.norm().max(1.0);
            let cutoff = infinite_cutoff(m, tol / 2.0);
            if cutoff > MAX_PRODUCT_CUTOFF {
                return Err(Error::Resource(format!("infinite product would need primes up to {cutoff:.3e}")));
            }
            let table = PrimeTable::shared(cutoff as u64);
            let primes = table.up_to(cutoff);
            let per = tol / (4.0 * primes.len() as f64);
            let (head, tails) = sum_log_factors(primes, |p| factor_log(p, z1, z2, per));
            let log_value = head + z1 * z2 * prime_zeta_tail(2.0, primes);
            let mut out = finish(log_value, primes, tails)?;
            out.tail_bound += remainder_bound(m, cutoff);
            Ok(out)
        }
    }
}

fn finish(log_value: Complex64, primes: &[u64], tails: f64) -> Result<MomentSeries> {
    if !tails.is_finite() {
        return Err(Error::Resource("a local factor did not converge".into()));
    }
    Ok(MomentSeries {
        value: log_value.exp(),
        log_value,
        primes_used: primes.len(),
        cutoff: primes.last().map_or(1.0, |&p| p as f64),
        tail_bound: tails,
    })
}

/// The shifted-order ratio and its leading-order prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedRatio {
    pub k: f64,
    pub r: f64,
    pub ratio: f64,
    pub log_ratio: f64,
    /// `exp(−r²(log log k + c₀)/k)`.
    pub predicted: f64,
    pub log_predicted: f64,
    /// Bound on the absolute error of `log_ratio`.
    pub tail_bound: f64,
}

/// `Σ d_{k−r}(n)d_{k+r}(n)/n² / Σ d_k(n)²/n²`, computed prime by prime in log space.
pub fn ratio_shifted(k: f64, r: f64, tol: f64) -> Result<ShiftedRatio> {
    check_tol(tol)?;
    if !(k > 1.0) {
        return domain(format!("ratio_shifted needs k > 1, got {k}"));
    }
    if !(r.abs() <= k.sqrt()) {
        return domain(format!("ratio_shifted needs |r| <= sqrt(k), got r = {r}, k = {k}"));
    }
    let m = k * k;
    // two remainders, one per product
    let cutoff = infinite_cutoff(m, tol / 4.0);
    if cutoff > MAX_PRODUCT_CUTOFF {
        return Err(Error::Resource(format!("ratio would need primes up to {cutoff:.3e}")));
    }
    let table = PrimeTable::shared(cutoff as u64);
    let primes = table.up_to(cutoff);
    let per = tol / (8.0 * primes.len() as f64);
    let (head, tails) = sum_log_factors(primes, |p| {
        let (num, _, t1) = log_series(p, k - r, k + r, per);
        let (den, _, t2) = log_series(p, k, k, per);
        (Complex64::new(num - den, 0.0), t1 + t2)
    });
    // z1 z2 − k² = −r²
    let log_ratio = head.re - r * r * prime_zeta_tail(2.0, primes);
    let c0 = Constants::get().c0;
    let log_predicted = -r * r * (k.ln().ln() + c0) / k;
    Ok(ShiftedRatio {
        k,
        r,
        ratio: log_ratio.exp(),
        log_ratio,
        predicted: log_predicted.exp(),
        log_predicted,
        tail_bound: tails + 2.0 * remainder_bound(m, cutoff),
    })
}

/// Smoothing scale `Z > 1` of `e^{−n/Z}`; `+∞` switches the smoothing off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParam(f64);

impl SmoothingParam {
    pub fn new(z: f64) -> Result<Self> {
        if !(z > 1.0) {
            return domain(format!("smoothing scale must exceed 1, got {z}"));
        }
        Ok(Self(z))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn weight(self, n: u64) -> f64 {
        if self.0.is_infinite() {
            1.0
        } else {
            (-(n as f64) / self.0).exp()
        }
    }

    /// `(log 3Z)^k`.
    pub fn cap(self, k: u32) -> f64 {
        (3.0 * self.0).ln().powi(k as i32)
    }
}

/// `d_k(n)` for `0 ≤ n ≤ bound` (index 0 unused) by a smallest-prime-factor sieve.
pub fn divisor_table(k: u32, bound: u64) -> Vec<f64> {
    let n = bound as usize;
    let mut spf = vec![0u32; n + 1];
    let mut d = vec![0.0f64; n + 1];
    if n >= 1 {
        d[1] = 1.0;
    }
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        let p = spf[i] as usize;
        let mut rest = i;
        let mut e = 0u32;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        d[i] = d[rest] * dz_prime_power(Complex64::new(k as f64, 0.0), e).re;
    }
    d
}

/// `Σ_{n≤bound} d_k(n) e^{−n/Z}/n` and the comparison with `(log 3Z)^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedSum {
    pub value: f64,
    pub cap: f64,
    pub within_cap: bool,
}

pub fn smoothed_divisor_sum(k: u32, z: SmoothingParam, bound: u64) -> Result<SmoothedSum> {
    if k < 1 {
        return domain("smoothed_divisor_sum needs k >= 1");
    }
    let d = divisor_table(k, bound);
    let value: NeumaierSum = (1..=bound).rev().map(|n| d[n as usize] * z.weight(n) / n as f64).collect();
    let value = value.value();
    let cap = z.cap(k);
    Ok(SmoothedSum { value, cap, within_cap: value <= cap })
}

/// Short-interval sum `Σ_{m<n<m+m/√T} d_k(n) e^{−n/Z}/n` and the matching bound
/// `(log 3Z)^k / y` with `y = exp(log T / log log T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortIntervalSum {
    pub value: f64,
    pub terms: u64,
    pub bound: f64,
}

pub fn short_interval_sum(m: u64, k: u32, t_scale: f64, z: SmoothingParam) -> Result<ShortIntervalSum> {
    if !(t_scale > std::f64::consts::E) {
        return domain(format!("T must exceed e, got {t_scale}"));
    }
    if !((m as f64) > t_scale.sqrt()) {
        return domain(format!("m = {m} must exceed sqrt(T) = {}", t_scale.sqrt()));
    }
    let upper = m as f64 + m as f64 / t_scale.sqrt();
    let mut acc = NeumaierSum::new();
    let mut terms = 0;
    let order = Complex64::new(k as f64, 0.0);
    let mut n = m + 1;
    while (n as f64) < upper {
        acc += dz(n, order)?.re * z.weight(n) / n as f64;
        terms += 1;
        n += 1;
    }
    let log_t = t_scale.ln();
    let y = (log_t / log_t.ln()).exp();
    Ok(ShortIntervalSum { value: acc.value(), terms, bound: z.cap(k) / y })
}

/// `Σ_{n∈S(y)} d_l(n)²/n²` and the leading factor `∏_{p≤l}(1 − 1/p)^{−2l}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothSquareMoment {
    pub value: f64,
    pub log_value: f64,
    pub leading_factor: f64,
    pub log_leading_factor: f64,
}

pub fn smooth_square_moment(l: u32, y: f64) -> Result<SmoothSquareMoment> {
    if !(y >= 0.0) {
        return domain(format!("y must be non-negative, got {y}"));
    }
    let log_value = if l == 0 {
        0.0
    } else {
        let z = Complex64::new(l as f64, 0.0);
        moment_series(z, z, Truncation::Finite(y), 1e-15)?.log_value.re
    };
    let table = PrimeTable::shared(l.max(2) as u64);
    let log_leading: NeumaierSum =
        table.up_to(l as f64).iter().map(|&p| -2.0 * l as f64 * (-1.0 / p as f64).ln_1p()).collect();
    let log_leading = log_leading.value();
    Ok(SmoothSquareMoment {
        value: log_value.exp(),
        log_value,
        leading_factor: log_leading.exp(),
        log_leading_factor: log_leading,
    })
}
