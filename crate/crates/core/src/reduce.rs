//! Compensated and order-stable reductions.
//!
//! Parallel work is always split into chunks of [`CHUNK`] items, independent of the
//! number of worker threads, and the per-chunk partials are combined by a fixed
//! pairwise tree. Results are therefore bit-identical for any thread count.

use std::ops::{Add, AddAssign, Range};

use num_complex::Complex64;
use rayon::prelude::*;

/// Work-unit size for every parallel loop in the crate.
pub const CHUNK: usize = 2048;

/// Kahan–Babuška–Neumaier accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

impl Add for NeumaierSum {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs.sum;
        self += rhs.comp;
        self
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// Compensated accumulator for complex values (independent real and imaginary parts).
#[derive(Debug, Default, Clone, Copy)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexSum {
    fn add_assign(&mut self, z: Complex64) {
        self.re += z.re;
        self.im += z.im;
    }
}

impl Add for ComplexSum {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

/// Combine partials by a balanced binary tree whose shape depends only on `len`.
pub fn tree_reduce<T: Copy>(items: &[T], identity: T, op: impl Fn(T, T) -> T + Copy) -> T {
    match items.len() {
        0 => identity,
        1 => items[0],
        n => {
            let (l, r) = items.split_at(n / 2);
            op(tree_reduce(l, identity, op), tree_reduce(r, identity, op))
        }
    }
}

/// Evaluate `f` on consecutive index ranges of length [`CHUNK`] in parallel,
/// returning the per-chunk results in index order.
pub fn par_chunks<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks).into_par_iter().map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(n))).collect()
}

/// Deterministic parallel map-and-sum over `0..n`.
pub fn par_sum(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    let partials = par_chunks(n, |r| r.map(&f).collect::<NeumaierSum>());
    tree_reduce(&partials, NeumaierSum::new(), |a, b| a + b).value()
}

/// Deterministic parallel map-and-sum of complex values over `0..n`.
pub fn par_sum_complex(n: usize, f: impl Fn(usize) -> Complex64 + Sync + Send) -> Complex64 {
    let partials = par_chunks(n, |r| {
        let mut acc = ComplexSum::new();
        for i in r {
            acc += f(i);
        }
        acc
    });
    tree_reduce(&partials, ComplexSum::new(), |a, b| a + b).value()
}

/// Deterministic parallel map over `0..n`, preserving index order.
pub fn par_map<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    par_chunks(n, |r| r.map(&f).collect::<Vec<_>>()).into_iter().flatten().collect()
}

/// `log Σ exp(x_i)` with the maximum factored out. Returns `-∞` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: NeumaierSum = xs.iter().map(|&x| (x - m).exp()).collect();
    m + s.value().ln()
}
