use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Result};
use crate::reduce::NeumaierSum;

use super::primes::sieve;
use super::quad::{integrate, Refined};
use super::special::{log_bessel_i0, prime_zeta_tail};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// The constants shared by the tail formulas and the moment asymptotics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// `∫₀² log I₀(t) dt/t² + ∫₂^∞ (log I₀(t) − t) dt/t²`.
    pub c: f64,
    /// `lim (Σ_{p≤x} 1/p − log log x)`.
    pub c0: f64,
    pub gamma: f64,
}

impl Constants {
    pub fn compute() -> Self {
        Self { c: constant_c(1e-13).expect("positive tolerance"), c0: mertens_c0(), gamma: EULER_GAMMA }
    }

    /// Process-wide cached values.
    pub fn get() -> &'static Constants {
        static CELL: OnceLock<Constants> = OnceLock::new();
        CELL.get_or_init(Constants::compute)
    }
}

/// Integrand of the first Bessel integral, `log I₀(t)/t²`, with its limit 1/4 at 0.
pub fn bessel_head_integrand(t: f64) -> f64 {
    if t < 1e-4 {
        // log I₀(t) = t²/4 − t⁴/64 + …
        return 0.25 - t * t / 64.0;
    }
    log_bessel_i0(t).expect("t >= 0") / (t * t)
}

/// Both refined quadratures that make up `C`.
pub fn constant_c_parts(tol: f64) -> Result<(Refined, Refined)> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let head = integrate(bessel_head_integrand, 0.0, 2.0, tol / 4.0);
    // log I₀(t) − t = −½ log(2πt) + h(t) with h(t) = O(1/t); the log part integrates
    // in closed form and h(1/u) is smooth on [0, 1/2]
    let h = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let t = 1.0 / u;
        log_bessel_i0(t).expect("t >= 0") - t + 0.5 * (2.0 * PI * t).ln()
    };
    let tail = integrate(h, 0.0, 0.5, tol / 4.0);
    Ok((head, tail))
}

/// The constant `C` of the extreme-value frequency formula, to within `tol`.
pub fn constant_c(tol: f64) -> Result<f64> {
    let (head, tail) = constant_c_parts(tol)?;
    let closed = -((4.0 * PI).ln() + 1.0) / 4.0;
    Ok(head.value + closed + tail.value)
}

/// `c₀ = γ + Σ_p (log(1 − 1/p) + 1/p)`.
///
/// Primes up to 1000 are summed directly; beyond that the summand is expanded as
/// `−Σ_{k≥2} p^{−k}/k` and each prime power sum comes from the prime zeta function.
/// The neglected `k > 12` terms total less than `1000^{−12}`.
pub fn mertens_c0() -> f64 {
    let table = sieve(1000).expect("limit >= 2");
    let mut acc = NeumaierSum::new();
    for &p in table.primes().iter().rev() {
        let x = 1.0 / p as f64;
        acc += (-x).ln_1p() + x;
    }
    for k in (2..=12).rev() {
        acc += -prime_zeta_tail(k as f64, table.primes()) / k as f64;
    }
    acc += EULER_GAMMA;
    acc.value()
}
