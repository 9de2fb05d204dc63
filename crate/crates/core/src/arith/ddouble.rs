//! Double-double arithmetic (about 31 significant digits).

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DoubleDouble = DoubleDouble { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn mul_pow2(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        Self { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn exp(self) -> Self {
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * k).mul_pow2(-10);
        // expm1(r) by Taylor series; |r| < 4e-4
        let mut term = r;
        let mut sum = r;
        for n in 2..16 {
            term = (term * r).div_f64(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        // (1 + s)^2 − 1 = 2s + s², ten times
        for _ in 0..10 {
            sum = sum * 2.0 + sum * sum;
        }
        (sum + Self::ONE).mul_pow2(k as i32)
    }

    /// Natural logarithm of a positive double, correct to double-double precision.
    pub fn ln(a: f64) -> Self {
        assert!(a > 0.0);
        let target = Self::from_f64(a);
        let mut y = Self::from_f64(a.ln());
        for _ in 0..2 {
            // Newton on exp(y) = a
            y = y + (target * (-y).exp() - Self::ONE);
        }
        y
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let r = (self.hi - p - e + self.lo) / b;
        let (hi, lo) = quick_two_sum(q1, r);
        Self { hi, lo }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        let d = *self - *other;
        d.hi.total_cmp(&0.0).then(d.lo.total_cmp(&0.0))
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;

    fn mul(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }
}
