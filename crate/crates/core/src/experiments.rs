//! Experiments on a uniform `t`-grid over `[T, 2T]`: moment integrals, empirical
//! tails, rotated moments and the argument-normality check.

use num_complex::Complex64;

use crate::arith::{Constants, EULER_GAMMA};
use crate::divisor::{ratio_shifted, smooth_square_moment};
use crate::error::{domain, Error, Result};
use crate::euler::{ry, zeta_line, EulerProduct};
use crate::reduce::{log_sum_exp, par_chunks, par_map, tree_reduce, ComplexSum, NeumaierSum};
use crate::stats::{normal_cdf, weighted_ks_statistic};

/// Fewest band points [`arg_normality`] accepts.
pub const MIN_BAND_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub t: f64,
    pub value: Complex64,
    pub log_value: Complex64,
}

/// `ζ(1+it, y)` at `n_points` equally spaced `t ∈ [T, 2T]`, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub t_scale: f64,
    pub n_points: usize,
    pub y: f64,
    pub samples: Vec<GridPoint>,
}

/// `t_i = T + iT/(n−1)`.
pub fn grid_points(t_scale: f64, n_points: usize) -> Vec<f64> {
    let h = t_scale / (n_points - 1) as f64;
    (0..n_points).map(|i| t_scale + i as f64 * h).collect()
}

fn check_grid(t_scale: f64, n_points: usize) -> Result<()> {
    if n_points < 2 {
        return domain(format!("a grid needs at least 2 points, got {n_points}"));
    }
    if !(t_scale > 0.0 && t_scale.is_finite()) {
        return domain(format!("T must be positive and finite, got {t_scale}"));
    }
    Ok(())
}

pub fn scan(t_scale: f64, n_points: usize, y: f64) -> Result<ScanGrid> {
    check_grid(t_scale, n_points)?;
    let euler = EulerProduct::new(y)?;
    let ts = grid_points(t_scale, n_points);
    let samples = euler
        .eval_grid(&ts, 0.0)
        .into_iter()
        .map(|p| GridPoint { t: p.t, value: p.value, log_value: p.log_value })
        .collect();
    Ok(ScanGrid { t_scale, n_points, y, samples })
}

/// Trapezoid average over a uniform grid of `f(i)`.
fn trapezoid_mean(n: usize, f: impl Fn(usize) -> Complex64 + Sync + Send) -> Complex64 {
    let partials = par_chunks(n, |range| {
        let mut acc = ComplexSum::new();
        for i in range {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += f(i) * w;
        }
        acc
    });
    tree_reduce(&partials, ComplexSum::new(), |a, b| a + b).value() / (n - 1) as f64
}

/// `(1/T)∫ ζ(1+it,y)^{z1} conj(ζ(1+it,y))^{z2} dt` by the trapezoid rule.
pub fn moment_integral(grid: &ScanGrid, z1: Complex64, z2: Complex64) -> Complex64 {
    if z1 == Complex64::new(0.0, 0.0) && z2 == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    let s = &grid.samples;
    trapezoid_mean(s.len(), |i| {
        let l = s[i].log_value;
        (z1 * l + z2 * l.conj()).exp()
    })
}

/// A moment integral refined by doubling the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedMoment {
    pub value: Complex64,
    pub n_points: usize,
    /// Change between the last two refinements.
    pub delta: f64,
}

pub fn moment_integral_refined(
    t_scale: f64,
    y: f64,
    z1: Complex64,
    z2: Complex64,
    start_points: usize,
    rel_tol: f64,
    max_points: usize,
) -> Result<RefinedMoment> {
    let mut n = start_points.max(2);
    let mut prev = moment_integral(&scan(t_scale, n, y)?, z1, z2);
    loop {
        // 2n − 1 points keep every old node
        n = 2 * n - 1;
        if n > max_points {
            return Err(Error::Resource(format!("moment integral not settled within {max_points} points")));
        }
        let next = moment_integral(&scan(t_scale, n, y)?, z1, z2);
        let delta = (next - prev).norm() / next.norm();
        if delta < rel_tol {
            return Ok(RefinedMoment { value: next, n_points: n, delta });
        }
        prev = next;
    }
}

/// Fraction of grid points with `|ζ| > e^γ τ` and `|arg ζ| > θ`.
pub fn empirical_tail(grid: &ScanGrid, tau: f64, theta: f64) -> Result<f64> {
    if !(tau >= 0.0) || !(theta >= 0.0) {
        return domain(format!("tail needs tau >= 0 and theta >= 0, got ({tau}, {theta})"));
    }
    let level = EULER_GAMMA + tau.ln();
    let hits = grid.samples.iter().filter(|p| p.log_value.re > level && p.log_value.im.abs() > theta).count();
    Ok(hits as f64 / grid.samples.len() as f64)
}

/// `I(k) = (1/T)∫|L_ψ(1+it,y) + R_y|^{2k} dt` and its diagonal prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedMoment {
    pub k: u32,
    pub log_value: f64,
    /// `log Σ_{l≤k} C(k,l)² R_y^{2k−2l} Σ_{n∈S(y)} d_l(n)²/n²`.
    pub log_central: f64,
}

impl RotatedMoment {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn central(&self) -> f64 {
        self.log_central.exp()
    }

    /// `I(k) / central`.
    pub fn ratio(&self) -> f64 {
        (self.log_value - self.log_central).exp()
    }
}

pub fn rotated_moment(t_scale: f64, n_points: usize, y: f64, psi: f64, k: u32) -> Result<RotatedMoment> {
    check_grid(t_scale, n_points)?;
    let euler = EulerProduct::new(y)?;
    rotated_moment_on(&euler, &grid_points(t_scale, n_points), psi, k)
}

/// [`rotated_moment`] on given nodes, which must be uniformly spaced.
pub fn rotated_moment_on(euler: &EulerProduct, ts: &[f64], psi: f64, k: u32) -> Result<RotatedMoment> {
    if k > 20 {
        return domain(format!("rotated moments are limited to k <= 20, got {k}"));
    }
    if ts.len() < 2 {
        return domain("a grid needs at least 2 points");
    }
    let y = euler.y();
    let r_y = ry(y)?;
    let log_central = central_prediction(k, y, r_y)?;
    if k == 0 {
        return Ok(RotatedMoment { k, log_value: 0.0, log_central });
    }
    let n = ts.len();
    let logs: Vec<f64> = par_map(n, |i| {
        let v = euler.eval(ts[i], psi).value;
        let w: f64 = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        2.0 * k as f64 * (v + r_y).norm().ln() + w.ln()
    });
    let log_value = log_sum_exp(&logs) - ((n - 1) as f64).ln();
    Ok(RotatedMoment { k, log_value, log_central })
}

fn central_prediction(k: u32, y: f64, r_y: f64) -> Result<f64> {
    let log_r = r_y.ln();
    let mut terms = Vec::with_capacity(k as usize + 1);
    let mut log_binom = 0.0f64;
    for l in 0..=k {
        if l > 0 {
            log_binom += ((k - l + 1) as f64 / l as f64).ln();
        }
        let s = if l == 0 { 0.0 } else { smooth_square_moment(l, y)?.log_value };
        terms.push(2.0 * log_binom + 2.0 * (k - l) as f64 * log_r + s);
    }
    Ok(log_sum_exp(&terms))
}

/// Weighted distribution of normalised arguments in the slice `Ω_T(τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityReport {
    pub tau: f64,
    /// `τ^{−1/5}`.
    pub epsilon: f64,
    /// `e^{τ−1−C}`.
    pub k: f64,
    pub ks_distance: f64,
    pub sample_count: usize,
    /// Weighted mean of the normalised argument.
    pub weighted_mean: f64,
    /// Weighted standard deviation of the normalised argument.
    pub weighted_sd: f64,
    /// Kish effective sample size of the weights.
    pub effective_count: f64,
}

pub fn arg_normality(t_scale: f64, tau: f64, y: f64, n_points: usize) -> Result<NormalityReport> {
    arg_normality_on_grid(&scan(t_scale, n_points, y)?, tau)
}

/// Selects `|ζ| ∈ e^γ[τ−ε, τ+ε]`, weights by `|ζ|^{2k}` and compares the law of
/// `arg ζ / √(log log k/(2k))` with the standard normal.
pub fn arg_normality_on_grid(grid: &ScanGrid, tau: f64) -> Result<NormalityReport> {
    let c = Constants::get().c;
    let log_k = tau - 1.0 - c;
    if !(log_k > 0.0 && log_k.ln() > 0.0) {
        return domain(format!("normality needs log(tau - 1 - C) > 0, got tau = {tau}"));
    }
    let k = log_k.exp();
    let epsilon = tau.powf(-0.2);
    let scale = (log_k.ln() / (2.0 * k)).sqrt();
    let (lo, hi) = (EULER_GAMMA.exp() * (tau - epsilon), EULER_GAMMA.exp() * (tau + epsilon));
    let band: Vec<&GridPoint> = grid.samples.iter().filter(|p| (lo..=hi).contains(&p.value.norm())).collect();
    if band.len() < MIN_BAND_POINTS {
        return Err(Error::Undersampled { needed: MIN_BAND_POINTS, got: band.len() });
    }
    let log_w: Vec<f64> = band.iter().map(|p| 2.0 * k * p.log_value.re).collect();
    let peak = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ws: Vec<f64> = log_w.iter().map(|&l| (l - peak).exp()).collect();
    let xs: Vec<f64> = band.iter().map(|p| p.log_value.im / scale).collect();
    let total: f64 = NeumaierSum::from_iter(ws.iter().copied()).value();
    let mean = NeumaierSum::from_iter(xs.iter().zip(&ws).map(|(x, w)| x * w)).value() / total;
    let var = NeumaierSum::from_iter(xs.iter().zip(&ws).map(|(x, w)| (x - mean).powi(2) * w)).value() / total;
    let sum_sq = NeumaierSum::from_iter(ws.iter().map(|w| w * w)).value();
    let ks_distance = weighted_ks_statistic(&xs, &ws, normal_cdf);
    Ok(NormalityReport {
        tau,
        epsilon,
        k,
        ks_distance,
        sample_count: band.len(),
        weighted_mean: mean,
        weighted_sd: var.sqrt(),
        effective_count: total * total / sum_sq,
    })
}

/// Share of `Σ|ζ|^{2k}` carried by the slice around the weighted mode of `|ζ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantSlice {
    pub k: f64,
    /// Centre of the heaviest bin of `|ζ|/e^γ`.
    pub tau_star: f64,
    pub fraction: f64,
}

pub fn dominant_slice(grid: &ScanGrid, tau: f64, bins: usize) -> Result<DominantSlice> {
    let c = Constants::get().c;
    let log_k = tau - 1.0 - c;
    if !(log_k > 0.0) || bins < 1 {
        return domain(format!("dominant slice needs tau > 1 + C and bins >= 1, got tau = {tau}"));
    }
    let k = log_k.exp();
    let epsilon = tau.powf(-0.2);
    let scaled: Vec<f64> = grid.samples.iter().map(|p| p.value.norm() / EULER_GAMMA.exp()).collect();
    let log_w: Vec<f64> = grid.samples.iter().map(|p| 2.0 * k * p.log_value.re).collect();
    let peak = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ws: Vec<f64> = log_w.iter().map(|&l| (l - peak).exp()).collect();
    let top = scaled.iter().copied().fold(0.0, f64::max);
    let width = top / bins as f64;
    let mut hist = vec![NeumaierSum::new(); bins];
    for (&s, &w) in scaled.iter().zip(&ws) {
        hist[((s / width) as usize).min(bins - 1)] += w;
    }
    let best = (0..bins).max_by(|&a, &b| hist[a].value().total_cmp(&hist[b].value())).unwrap_or(0);
    let tau_star = (best as f64 + 0.5) * width;
    let total: f64 = NeumaierSum::from_iter(ws.iter().copied()).value();
    let inside = NeumaierSum::from_iter(
        scaled.iter().zip(&ws).filter(|(&s, _)| (s - tau_star).abs() <= epsilon).map(|(_, &w)| w),
    )
    .value();
    Ok(DominantSlice { k, tau_star, fraction: inside / total })
}

/// Divisor-side check of the characteristic function of the normalised argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFunctionCheck {
    pub k: f64,
    pub eta: f64,
    /// `η / √(log log k/(2k))`.
    pub xi: f64,
    /// `log` of the ratio at shifted orders `k ∓ ξ/2`.
    pub log_ratio: f64,
    /// `−η²/2 − c₀η²/(2 log log k)`.
    pub predicted: f64,
    pub tail_bound: f64,
}

impl CharFunctionCheck {
    pub fn deviation(&self) -> f64 {
        (self.log_ratio - self.predicted).abs()
    }
}

pub fn char_function_check(k: f64, eta: f64, tol: f64) -> Result<CharFunctionCheck> {
    if !(k > std::f64::consts::E.exp()) {
        return domain(format!("characteristic-function check needs log log k > 1, got k = {k}"));
    }
    let llk = k.ln().ln();
    let xi = eta / (llk / (2.0 * k)).sqrt();
    let r = ratio_shifted(k, xi / 2.0, tol)?;
    let c0 = Constants::get().c0;
    let predicted = -eta * eta / 2.0 - c0 * eta * eta / (2.0 * llk);
    Ok(CharFunctionCheck { k, eta, xi, log_ratio: r.log_ratio, predicted, tail_bound: r.tail_bound })
}

/// Mean of `|ζ(1+it) − ζ(1+it,y)|` over the given `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationError {
    pub y: f64,
    pub mean_abs: f64,
    pub max_abs: f64,
}

pub fn truncation_error(ts: &[f64], y: f64, tol: f64) -> Result<TruncationError> {
    if ts.is_empty() {
        return domain("truncation error needs at least one t");
    }
    let euler = EulerProduct::new(y)?;
    let exact: Vec<Result<Complex64>> = par_map(ts.len(), |i| zeta_line(ts[i], tol));
    let mut acc = NeumaierSum::new();
    let mut max_abs = 0.0f64;
    for (i, z) in exact.into_iter().enumerate() {
        let d = (z? - euler.eval(ts[i], 0.0).value).norm();
        acc += d;
        max_abs = max_abs.max(d);
    }
    Ok(TruncationError { y, mean_abs: acc.value() / ts.len() as f64, max_abs })
}
