//! Kolmogorov–Smirnov statistics and the normal distribution function.

use std::f64::consts::SQRT_2;

/// Asymptotic one-sample Kolmogorov critical value at level 1%, to be divided by `√n`.
pub const KS_CRITICAL_1PCT: f64 = 1.6276;

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `sup |F_n − F|` for an unweighted sample; `xs` need not be sorted.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Weighted K–S distance between the empirical law `Σ w_i δ_{x_i} / Σ w_i` and `cdf`.
/// Ties in `x` are merged before comparing.
pub fn weighted_ks_statistic(xs: &[f64], ws: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert_eq!(xs.len(), ws.len());
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    let total: f64 = crate::reduce::NeumaierSum::from_iter(ws.iter().copied()).value();
    let mut acc = crate::reduce::NeumaierSum::new();
    let mut d = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let x = xs[order[i]];
        let f = cdf(x);
        let below = acc.value() / total;
        while i < order.len() && xs[order[i]] == x {
            acc += ws[order[i]];
            i += 1;
        }
        let upto = acc.value() / total;
        d = d.max((f - below).abs()).max((upto - f).abs());
    }
    d
}

/// Two-sample K–S distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical two-sample distance at level 1%.
pub fn ks_two_sample_critical_1pct(na: usize, nb: usize) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    KS_CRITICAL_1PCT * ((na + nb) / (na * nb)).sqrt()
}
