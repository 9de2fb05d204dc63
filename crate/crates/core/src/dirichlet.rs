//! `L(1, χ)` for every non-principal character modulo a prime `q`.
//!
//! With `χ_e(g^k) = e^{2πi ek/(q−1)}` for a primitive root `g`,
//! `L(1, χ_e) = −(1/q) Σ_k χ_e(g^k) ψ(g^k/q)`, so all `q − 2` values come out of one
//! length-`(q−1)` DFT of `k ↦ ψ(g^k/q)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::arith::{digamma, factorize, is_prime, PrimeTable, EULER_GAMMA};
use crate::error::{domain, Result};
use crate::reduce::{par_map, ComplexSum};
use crate::torus::BoxSpec;

pub const MAX_MODULUS: u64 = 1_000_000;

/// Discrete logarithms modulo a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    q: u64,
    generator: u64,
    /// `dlog[a]` for `1 ≤ a < q`; `dlog[0]` is unused.
    dlog: Vec<u32>,
    /// `power[k] = g^k mod q`.
    power: Vec<u32>,
}

impl CharacterTable {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Number of characters, `φ(q) = q − 1`.
    pub fn order(&self) -> u64 {
        self.q - 1
    }

    pub fn dlog(&self, a: u64) -> Option<u64> {
        let r = a % self.q;
        (r != 0).then(|| self.dlog[r as usize] as u64)
    }

    pub fn power(&self, k: u64) -> u64 {
        self.power[(k % (self.q - 1)) as usize] as u64
    }

    /// `χ_e(n)`, zero when `q | n`.
    pub fn character(&self, e: u64, n: u64) -> Complex64 {
        match self.dlog(n) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => unit_root(e * k % (self.q - 1), self.q - 1),
        }
    }

    /// `arg χ_e(p) / 2π` reduced to `[0, 1)`, as the exact numerator over `q − 1`.
    pub fn normalized_arg_numerator(&self, e: u64, n: u64) -> Option<u64> {
        self.dlog(n).map(|k| (e % (self.q - 1)) * k % (self.q - 1))
    }
}

fn unit_root(num: u64, den: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * num as f64 / den as f64)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Smallest primitive root and the discrete-log tables for a prime `3 ≤ q ≤ 10⁶`.
pub fn build_table(q: u64) -> Result<CharacterTable> {
    if !(3..=MAX_MODULUS).contains(&q) {
        return domain(format!("modulus must lie in [3, {MAX_MODULUS}], got {q}"));
    }
    if !is_prime(q) {
        return domain(format!("modulus must be prime, got {q}"));
    }
    let n = q - 1;
    let divisors: Vec<u64> = factorize(n).into_iter().map(|(r, _)| n / r).collect();
    let generator = (2..q)
        .find(|&g| divisors.iter().all(|&d| pow_mod(g, d, q) != 1))
        .expect("a prime modulus has a primitive root");
    let mut dlog = vec![0u32; q as usize];
    let mut power = vec![0u32; n as usize];
    let mut x = 1u64;
    for k in 0..n {
        power[k as usize] = x as u32;
        dlog[x as usize] = k as u32;
        x = x * generator % q;
    }
    Ok(CharacterTable { q, generator, dlog, power })
}

/// `L(1, χ_e)` for `e = 1, …, q − 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LValueSet {
    pub q: u64,
    values: Vec<Complex64>,
}

impl LValueSet {
    /// Value for character exponent `e ∈ [1, q − 2]`.
    pub fn get(&self, e: u64) -> Complex64 {
        self.values[(e - 1) as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Exponent of the quadratic character.
    pub fn quadratic_exponent(&self) -> u64 {
        (self.q - 1) / 2
    }
}

pub fn l1_all(table: &CharacterTable) -> LValueSet {
    let q = table.q;
    let n = (q - 1) as usize;
    let mut buf: Vec<Complex64> =
        table.power.iter().map(|&a| Complex64::new(digamma(a as f64 / q as f64), 0.0)).collect();
    // Σ_k x_k e^{+2πi ek/n} is the unnormalised inverse transform
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = -1.0 / q as f64;
    LValueSet { q, values: buf[1..].iter().map(|&v| v * scale).collect() }
}

/// Direct `O(q)` evaluation of one `L(1, χ_e)`, independent of the transform.
pub fn l1_direct(table: &CharacterTable, e: u64) -> Complex64 {
    let q = table.q;
    let mut acc = ComplexSum::new();
    for a in 1..q {
        acc += table.character(e, a) * digamma(a as f64 / q as f64);
    }
    acc.value() * (-1.0 / q as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterTail {
    /// Fraction of non-principal characters with `|L| > e^γ τ` and `|arg L| > θ`.
    pub fraction: f64,
    /// Values in the left half-plane, where the principal argument is near `±π`.
    pub wrap_events: usize,
}

pub fn phi_q_tail(values: &LValueSet, tau: f64, theta: f64) -> Result<CharacterTail> {
    if !(tau > 0.0) || !(theta >= 0.0) {
        return domain(format!("tail needs tau > 0 and theta >= 0, got ({tau}, {theta})"));
    }
    let level = EULER_GAMMA.exp() * tau;
    let hits = values.values.iter().filter(|v| v.norm() > level && v.arg().abs() > theta).count();
    let wrap_events = values.values.iter().filter(|v| v.re < 0.0).count();
    Ok(CharacterTail { fraction: hits as f64 / values.len() as f64, wrap_events })
}

/// Count of characters (all `q − 1`, principal included) with
/// `a_j ≤ {arg χ(p_j)/2π} < b_j` for each prime `p_j ≤ y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquidistCount {
    pub count: u64,
    /// `φ(q) ∏ δ_j`.
    pub expected: f64,
}

pub fn char_equidist(table: &CharacterTable, y: f64, spec: &BoxSpec) -> Result<EquidistCount> {
    let primes = PrimeTable::shared(y.max(2.0) as u64).up_to(y).to_vec();
    if primes.len() > crate::torus::MAX_BOX_PRIMES {
        return domain(format!("at most {} primes, y = {y} gives {}", crate::torus::MAX_BOX_PRIMES, primes.len()));
    }
    if primes.len() != spec.len() {
        return domain(format!("box has {} intervals for {} primes", spec.len(), primes.len()));
    }
    if primes.contains(&table.q) {
        return domain(format!("prime {} equals the modulus", table.q));
    }
    let n = table.order();
    let logs: Vec<u64> = primes.iter().map(|&p| table.dlog(p).expect("p is not q")).collect();
    let bounds: Vec<(f64, f64)> = spec.intervals().iter().map(|&(a, b)| (a * n as f64, b * n as f64)).collect();
    let counts = crate::reduce::par_chunks(n as usize, |range| {
        range
            .filter(|&e| {
                logs.iter().zip(&bounds).all(|(&k, &(lo, hi))| {
                    let r = (e as u64 * k % n) as f64;
                    lo <= r && r < hi
                })
            })
            .count() as u64
    });
    let count = counts.iter().sum();
    Ok(EquidistCount { count, expected: n as f64 * spec.deltas().iter().product::<f64>() })
}

/// `∏_{p ≤ y, p ≠ q} (1 − χ_e(p)/p)^{−1}` for `e = 1, …, q − 2`.
pub fn euler_products(table: &CharacterTable, y: f64) -> Vec<Complex64> {
    let primes = PrimeTable::shared(y.max(2.0) as u64);
    let primes: Vec<u64> = primes.up_to(y).iter().copied().filter(|&p| p != table.q).collect();
    let n = table.order();
    par_map((n - 2) as usize, |i| {
        let e = i as u64 + 1;
        let mut acc = ComplexSum::new();
        for &p in &primes {
            let chi = table.character(e, p);
            acc += -(Complex64::new(1.0, 0.0) - chi / p as f64).ln();
        }
        acc.value().exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables() {
        assert_eq!(build_table(7).unwrap().generator(), 3);
        assert_eq!(build_table(5).unwrap().generator(), 2);
        for q in [3, 11, 101, 1009] {
            let t = build_table(q).unwrap();
            assert_eq!(t.dlog(1), Some(0));
            for a in 1..q {
                assert_eq!(t.power(t.dlog(a).unwrap()), a);
            }
        }
        assert!(build_table(9).is_err());
        assert!(build_table(2).is_err());
        assert!(build_table(1_000_003).is_err());
    }

    #[test]
    fn class_number_anchors() {
        let l = l1_all(&build_table(3).unwrap());
        let v = l.get(l.quadratic_exponent());
        assert!((v.re - PI / (3.0 * 3f64.sqrt())).abs() < 1e-12 && v.im.abs() < 1e-14);
        let l = l1_all(&build_table(5).unwrap());
        let v = l.get(l.quadratic_exponent());
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((v.re - 2.0 / 5f64.sqrt() * golden.ln()).abs() < 1e-12);
    }

    #[test]
    fn transform_matches_direct_sum() {
        let t = build_table(101).unwrap();
        let l = l1_all(&t);
        for e in [1, 7, 50, 99] {
            assert!((l.get(e) - l1_direct(&t, e)).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_pairing() {
        for q in (3..=100).filter(|&q| is_prime(q)) {
            let l = l1_all(&build_table(q).unwrap());
            for e in 1..q - 1 {
                let (a, b) = (l.get(e), l.get(q - 1 - e));
                assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
            }
        }
    }

    #[test]
    fn orthogonality() {
        for q in [5, 13, 101] {
            let t = build_table(q).unwrap();
            for (n, m) in [(2, 2), (2, 3), (7, 7 + q), (1, q - 1)] {
                let s: Complex64 = (0..q - 1).map(|e| t.character(e, n) * t.character(e, m).conj()).sum();
                let expect = if n % q == m % q { (q - 1) as f64 } else { 0.0 };
                assert!((s - expect).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn tail_examples() {
        let l = l1_all(&build_table(1009).unwrap());
        let max = l.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let above = max / EULER_GAMMA.exp() * 1.01;
        assert_eq!(phi_q_tail(&l, above, 0.0).unwrap().fraction, 0.0);
        let mut last = 1.0;
        for tau in [0.1, 0.3, 0.6, 1.0] {
            let f = phi_q_tail(&l, tau, 0.2).unwrap().fraction;
            assert!(f <= last);
            last = f;
            assert!(phi_q_tail(&l, tau, 0.4).unwrap().fraction <= f);
        }
    }

    #[test]
    fn equidistribution_counts() {
        let t = build_table(10007).unwrap();
        let full = BoxSpec::uniform(2, 0.0, 1.0).unwrap();
        assert_eq!(char_equidist(&t, 3.0, &full).unwrap().count, 10006);
        let quarter = BoxSpec::uniform(2, 0.0, 0.5).unwrap();
        let c = char_equidist(&t, 3.0, &quarter).unwrap();
        assert!((c.count as f64 / 10006.0 - 0.25).abs() <= 0.02);
        let one = BoxSpec::uniform(1, 0.0, 0.3).unwrap();
        let c = char_equidist(&t, 2.0, &one).unwrap();
        assert!((c.count as f64 / 10006.0 - 0.3).abs() <= 1.0 / 10006.0 * 3.0);
        let small = build_table(3).unwrap();
        assert!(char_equidist(&small, 3.0, &quarter).is_err());
    }
}
