//! Equidistribution of `({t log p_j / 2π})_j` on the torus: exact box measures,
//! degree selection for the approximating polynomials, and minima of linear forms
//! in logarithms of primes.

use std::f64::consts::PI;

use crate::arith::ddouble::DoubleDouble;
use crate::arith::PrimeTable;
use crate::error::{domain, Error, Result};
use crate::reduce::{par_map, NeumaierSum};

/// Most primes a box may constrain.
pub const MAX_BOX_PRIMES: usize = 6;
/// Most interval endpoints a sweep may enumerate.
pub const MAX_BREAKPOINTS: f64 = 1e8;
/// Most (coordinate × vector) operations a lattice enumeration may take.
pub const MAX_ENUMERATION: f64 = 1e8;

/// `{t log p / 2π}` for every prime `p ≤ y`.
pub fn frac_parts(t: f64, y: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return domain(format!("frac_parts needs t >= 0, got {t}"));
    }
    let table = PrimeTable::shared(y.max(2.0) as u64);
    Ok(table.up_to(y).iter().map(|&p| (t * (p as f64).ln() / (2.0 * PI)).fract()).collect())
}

/// One interval `(a_j, b_j) ⊆ [0, 1]` per prime, in increasing prime order.
///
/// `(0, 1)` is allowed and differs from the whole circle only by a null set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSpec {
    intervals: Vec<(f64, f64)>,
}

impl BoxSpec {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return domain("a box needs at least one interval");
        }
        for &(a, b) in &intervals {
            if !(0.0 <= a && a < b && b <= 1.0) {
                return domain(format!("box interval ({a}, {b}) must satisfy 0 <= a < b <= 1"));
            }
        }
        Ok(Self { intervals })
    }

    /// The same interval for each of the first `n` primes.
    pub fn uniform(n: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b); n])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.intervals.iter().map(|&(a, b)| b - a).collect()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepResult {
    pub measure: f64,
    pub breakpoints: usize,
    pub t: f64,
    /// `T ∏ δ_j`.
    pub expected: f64,
}

/// Open sub-intervals of `[lo, hi]` where `{ωt} ∈ (a, b)`.
fn prime_intervals(omega: f64, a: f64, b: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let first = (omega * lo).floor() as i64 - 1;
    let last = (omega * hi).ceil() as i64 + 1;
    let mut out = Vec::with_capacity((last - first + 1).max(0) as usize);
    for n in first..=last {
        let s = ((n as f64 + a) / omega).max(lo);
        let e = ((n as f64 + b) / omega).min(hi);
        if e > s {
            out.push((s, e));
        }
    }
    out
}

/// Intersection of two sorted lists of disjoint intervals.
fn intersect(x: &[(f64, f64)], y: &[(f64, f64)], min_len: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        let s = x[i].0.max(y[j].0);
        let e = x[i].1.min(y[j].1);
        if e - s > min_len {
            out.push((s, e));
        }
        if x[i].1 < y[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Exact measure of `{t ∈ [T, 2T] : {t log p_j/2π} ∈ I_j for all j}`.
pub fn box_measure(t_scale: f64, y: f64, spec: &BoxSpec) -> Result<SweepResult> {
    box_measure_on(t_scale, 2.0 * t_scale, y, spec).map(|mut r| {
        r.t = t_scale;
        r
    })
}

/// [`box_measure`] over an arbitrary window `[lo, hi]`; `expected` is `(hi − lo)∏δ_j`.
pub fn box_measure_on(lo: f64, hi: f64, y: f64, spec: &BoxSpec) -> Result<SweepResult> {
    if !(lo >= 1.0 && hi > lo) || !hi.is_finite() {
        return domain(format!("sweep window must satisfy 1 <= lo < hi, got [{lo}, {hi}]"));
    }
    let table = PrimeTable::shared(y.max(2.0) as u64);
    let primes = table.up_to(y);
    if primes.is_empty() {
        return domain(format!("no primes up to y = {y}"));
    }
    if primes.len() > MAX_BOX_PRIMES {
        return Err(Error::Resource(format!(
            "box sweep supports at most {MAX_BOX_PRIMES} primes, y = {y} gives {}",
            primes.len()
        )));
    }
    if spec.len() != primes.len() {
        return domain(format!("box has {} intervals but there are {} primes up to {y}", spec.len(), primes.len()));
    }
    let estimate: f64 = primes.iter().map(|&p| (hi - lo) * (p as f64).ln() / PI).sum();
    if estimate > MAX_BREAKPOINTS {
        return Err(Error::Resource(format!("sweep would enumerate about {estimate:.3e} breakpoints")));
    }
    let lists = par_map(primes.len(), |j| {
        let omega = (primes[j] as f64).ln() / (2.0 * PI);
        let (a, b) = spec.intervals[j];
        prime_intervals(omega, a, b, lo, hi)
    });
    let breakpoints = lists.iter().map(|l| 2 * l.len()).sum();
    let min_len = 1e-12 * hi;
    let mut current = lists[0].clone();
    for list in &lists[1..] {
        current = intersect(&current, list, min_len);
    }
    let measure: NeumaierSum = current.iter().map(|&(s, e)| e - s).collect();
    let expected = (hi - lo) * spec.deltas().iter().product::<f64>();
    Ok(SweepResult { measure: measure.value(), breakpoints, t: hi - lo, expected })
}

/// Measure of `{t ∈ [0, x] : {ωt} ∈ (a, b)}` counted by whole periods and one fragment.
pub fn single_prime_closed_form(p: u64, a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    let omega = (p as f64).ln() / (2.0 * PI);
    let f = |x: f64| {
        let u = omega * x;
        (u.floor() * (b - a) + (u.fract() - a).clamp(0.0, b - a)) / omega
    };
    f(hi) - f(lo)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreePlan {
    pub degrees: Vec<u64>,
    /// `Σ L_j log p_j`.
    pub product_log: f64,
    /// `Σ 1/(δ_j (L_j + 1))`.
    pub defect: f64,
    /// `floor(log T / 2N)`.
    pub base: u64,
}

/// `L = floor(log T/2N)` and `L_j = floor(L/log p_j)` for the first `N` primes.
pub fn choose_degrees(t_scale: f64, n: usize, deltas: &[f64]) -> Result<DegreePlan> {
    if n < 1 {
        return domain("choose_degrees needs N >= 1");
    }
    let log_t = t_scale.ln();
    if !(log_t >= 2.0 * n as f64) {
        return domain(format!("choose_degrees needs log T >= 2N, got log T = {log_t}, N = {n}"));
    }
    if deltas.len() != n || deltas.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
        return domain("choose_degrees needs N interval lengths in (0, 1]");
    }
    let base = (log_t / (2.0 * n as f64)).floor() as u64;
    let table = PrimeTable::shared(64);
    let primes = first_primes(&table, n)?;
    let mut degrees = Vec::with_capacity(n);
    for &p in &primes {
        let l = (base as f64 / (p as f64).ln()).floor() as u64;
        if l == 0 {
            return domain(format!("degenerate degree at p = {p}: T too small for N = {n}"));
        }
        degrees.push(l);
    }
    let product_log: f64 = degrees.iter().zip(&primes).map(|(&l, &p)| l as f64 * (p as f64).ln()).sum();
    if product_log > log_t / 2.0 {
        return Err(Error::Consistency(format!("degree plan exceeds log T / 2: {product_log}")));
    }
    let defect = deltas.iter().zip(&degrees).map(|(&d, &l)| 1.0 / (d * (l + 1) as f64)).sum();
    Ok(DegreePlan { degrees, product_log, defect, base })
}

fn first_primes(table: &PrimeTable, n: usize) -> Result<Vec<u64>> {
    if table.len() >= n {
        return Ok(table.primes()[..n].to_vec());
    }
    // p_n < n(ln n + ln ln n) for n ≥ 6
    let nf = n as f64;
    let bound = (nf * (nf.ln() + nf.ln().ln())).ceil().max(20.0) as u64;
    let table = PrimeTable::shared(bound);
    Ok(table.primes()[..n].to_vec())
}

/// Minimum of `|Σ l_j log p_j|` over nonzero `l ∈ [−L, L]^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFormMin {
    pub value: DoubleDouble,
    /// Normalised so the last nonzero coordinate is positive.
    pub witness: Vec<i64>,
}

impl LinearFormMin {
    pub fn min_value(&self) -> f64 {
        self.value.to_f64()
    }
}

/// `Σ l_j log p_j` in double-double arithmetic.
pub fn linear_form(logs: &[DoubleDouble], l: &[i64]) -> DoubleDouble {
    logs.iter().zip(l).fold(DoubleDouble::ZERO, |acc, (&g, &c)| acc + g * c as f64)
}

fn canonical(l: &mut [i64]) {
    if let Some(&last) = l.iter().rev().find(|&&c| c != 0) {
        if last < 0 {
            l.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

/// `log p_j` in double-double for the first `n` primes.
pub fn prime_logs(n: usize) -> Result<Vec<DoubleDouble>> {
    let table = PrimeTable::shared(64);
    Ok(first_primes(&table, n)?.iter().map(|&p| DoubleDouble::ln(p as f64)).collect())
}

/// Exhaustive search; the first minimum in lexicographic order (first coordinate
/// outermost, each running −L..=L) among canonical vectors wins.
pub fn min_linear_form(n: usize, l_max: u32) -> Result<LinearFormMin> {
    if n < 1 || l_max < 1 {
        return domain("min_linear_form needs N >= 1 and L >= 1");
    }
    let side = 2.0 * l_max as f64 + 1.0;
    let cost = n as f64 * side.powi(n as i32);
    if cost > MAX_ENUMERATION {
        return Err(Error::Resource(format!("enumeration of {cost:.3e} exceeds budget {MAX_ENUMERATION:.0e}")));
    }
    let logs = prime_logs(n)?;
    let lm = l_max as i64;
    let width = 2 * lm + 1;
    let rest = n - 1;
    let per_lead = width.pow(rest as u32);
    // one task per leading coordinate, reduced in order
    let best = par_map(width as usize, |lead| {
        let mut l = vec![-lm; n];
        l[0] = lead as i64 - lm;
        let mut best: Option<(DoubleDouble, Vec<i64>)> = None;
        for code in 0..per_lead {
            let mut c = code;
            for j in (1..n).rev() {
                l[j] = c % width - lm;
                c /= width;
            }
            if l.iter().all(|&x| x == 0) {
                continue;
            }
            let mut v = l.clone();
            canonical(&mut v);
            if v != l {
                continue;
            }
            let value = linear_form(&logs, &l).abs();
            if best.as_ref().is_none_or(|(b, _)| value.total_cmp(b).is_lt()) {
                best = Some((value, l.clone()));
            }
        }
        best
    });
    let (value, witness) = best
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0.total_cmp(&a.0).is_lt() { b } else { a })
        .expect("nonzero vectors exist");
    Ok(LinearFormMin { value, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::approx_constant)]
    fn frac_parts_examples() {
        assert!(frac_parts(0.0, 100.0).unwrap().iter().all(|&x| x == 0.0));
        let f = frac_parts(2.0 * PI, 3.0).unwrap();
        assert!((f[0] - 0.6931471805599453).abs() < 1e-15);
        assert!((f[1] - 0.09861228866810978).abs() < 1e-15);
        let (t1, t2) = (123.25, 987.5);
        let a = frac_parts(t1, 30.0).unwrap();
        let b = frac_parts(t2, 30.0).unwrap();
        let s = frac_parts(t1 + t2, 30.0).unwrap();
        for j in 0..s.len() {
            let d = (a[j] + b[j] - s[j]).rem_euclid(1.0);
            assert!(!(1e-11..=1.0 - 1e-11).contains(&d));
        }
        assert!(frac_parts(-1.0, 3.0).is_err());
    }

    #[test]
    fn box_validation() {
        assert!(BoxSpec::new(vec![(0.5, 0.5)]).is_err());
        assert!(BoxSpec::new(vec![(-0.1, 0.5)]).is_err());
        assert!(BoxSpec::new(vec![]).is_err());
        let spec = BoxSpec::uniform(1, 0.0, 0.5).unwrap();
        assert!(box_measure(1e3, 3.0, &spec).is_err());
        let big = BoxSpec::uniform(7, 0.0, 0.5).unwrap();
        assert!(matches!(box_measure(1e3, 17.0, &big), Err(Error::Resource(_))));
    }

    #[test]
    fn full_box_measure() {
        let spec = BoxSpec::uniform(3, 1e-9, 1.0 - 1e-9).unwrap();
        let r = box_measure(1e4, 5.0, &spec).unwrap();
        assert!((r.measure / 1e4 - 1.0).abs() < 1e-7);
        let spec = BoxSpec::uniform(3, 0.0, 1.0).unwrap();
        let r = box_measure(1e4, 5.0, &spec).unwrap();
        assert!((r.measure - 1e4).abs() < 1e-6);
    }

    #[test]
    fn single_prime_matches_closed_form() {
        let spec = BoxSpec::uniform(1, 0.0, 0.5).unwrap();
        for t in [10.0, 1234.5, 1e5] {
            let r = box_measure(t, 2.0, &spec).unwrap();
            let closed = single_prime_closed_form(2, 0.0, 0.5, t, 2.0 * t);
            assert!((r.measure - closed).abs() < 1e-9 * t);
            assert!((r.measure / t - 0.5).abs() <= 1.0 / (t * 2f64.ln()));
        }
    }

    #[test]
    fn two_prime_quarter() {
        let spec = BoxSpec::uniform(2, 0.0, 0.5).unwrap();
        let r = box_measure(1e5, 3.0, &spec).unwrap();
        assert!((r.measure / r.t - 0.25).abs() <= 0.01);
        assert_eq!(r.expected, 0.25e5);
    }

    #[test]
    fn degrees_example() {
        let t = 100f64.exp();
        let plan = choose_degrees(t, 3, &[0.5, 0.5, 0.5]).unwrap();
        assert_eq!(plan.base, 16);
        assert_eq!(plan.degrees, vec![23, 14, 9]);
        assert!((plan.product_log - 45.8).abs() < 0.05 && plan.product_log <= 50.0);
        let one = choose_degrees(t, 1, &[0.3]).unwrap();
        assert_eq!(one.degrees, vec![(100.0 / (2.0 * 2f64.ln())).floor() as u64]);
        let bigger = choose_degrees(200f64.exp(), 3, &[0.5, 0.5, 0.5]).unwrap();
        assert!(bigger.defect < plan.defect);
        assert!(choose_degrees(10f64.exp(), 5, &[0.5; 5]).is_err());
        assert!(choose_degrees(t, 0, &[]).is_err());
    }

    #[test]
    fn linear_form_small_cases() {
        let m = min_linear_form(2, 1).unwrap();
        assert_eq!(m.witness, vec![-1, 1]);
        assert!((m.min_value() - 1.5f64.ln()).abs() < 1e-15);
        for l in 1..5 {
            let m = min_linear_form(1, l).unwrap();
            assert_eq!(m.witness, vec![1]);
            assert_eq!(m.value, DoubleDouble::ln(2.0));
        }
        assert!(matches!(min_linear_form(8, 10), Err(Error::Resource(_))));
    }
}
