//! The random Euler product `L(1,X,y) = ∏_{p≤y} (1 − X(p)/p)^{−1}` with `X(p)`
//! independent and uniform on the unit circle.
//!
//! Angles come from ChaCha8 keyed by the seed, with the sample index as the stream
//! and the prime's rank as the position in it, so a sample does not depend on
//! which thread draws it or in what order.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{Constants, PrimeTable, EULER_GAMMA};
use crate::error::{domain, Result};
use crate::reduce::{par_chunks, par_map, tree_reduce, ComplexSum, NeumaierSum};

/// Stream offset for conditioned draws, so they never reuse unconditioned angles.
const CONDITIONED_STREAM: u64 = 1 << 63;

/// How angles are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    #[default]
    Uniform,
    /// Every angle is 0, giving the maximal product `R_y`.
    AllZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub y: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub mode: SamplingMode,
}

impl ModelConfig {
    pub fn new(y: f64, n_samples: usize, seed: u64) -> Result<Self> {
        if !(y >= 2.0) {
            return domain(format!("random model needs y >= 2, got {y}"));
        }
        if n_samples < 1 {
            return domain("random model needs at least one sample");
        }
        Ok(Self { y, n_samples, seed, mode: SamplingMode::Uniform })
    }

    pub fn with_mode(mut self, mode: SamplingMode) -> Self {
        self.mode = mode;
        self
    }
}

/// One draw of `L(1,X,y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSample {
    /// `θ_p ∈ (−π, π]`, one per prime `≤ y` in increasing order.
    pub angles: Vec<f64>,
    pub log_value: Complex64,
    pub value: Complex64,
}

impl RandomSample {
    /// Rebuilds a sample from its angles; `inv_p[i] = 1/p_i`.
    pub fn from_angles(inv_p: &[f64], angles: Vec<f64>) -> Self {
        assert_eq!(inv_p.len(), angles.len());
        let log_value = log_product(inv_p, |i| angles[i]);
        Self { angles, log_value, value: log_value.exp() }
    }
}

/// Factors multiplied together before one logarithm is taken.
const BLOCK: usize = 16;

/// `Σ_p −log(1 − e^{iθ_p}/p)` with principal per-factor logarithms.
///
/// Factors are multiplied in blocks of [`BLOCK`]; a block's argument is at most
/// `Σ arcsin(1/p) < 1.7` over the first sixteen primes, so the principal log of a block
/// is the sum of the principal logs of its factors.
fn log_product(inv_p: &[f64], mut angle: impl FnMut(usize) -> f64) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (b, chunk) in inv_p.chunks(BLOCK).enumerate() {
        let mut prod = Complex64::new(1.0, 0.0);
        for (j, &q) in chunk.iter().enumerate() {
            let (s, c) = angle(b * BLOCK + j).sin_cos();
            prod *= Complex64::new(1.0 - c * q, -s * q);
        }
        acc += -prod.ln();
    }
    acc.value()
}

/// Uniform angle in `(−π, π]` from 53 random bits.
#[inline]
fn angle_from_bits(bits: u64) -> f64 {
    let u = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    PI - 2.0 * PI * u
}

/// Uniform in `[0, 1)` from 53 random bits.
#[inline]
fn unit_from_bits(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn wrap_angle(a: f64) -> f64 {
    let w = a - 2.0 * PI * (a / (2.0 * PI)).round();
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Primes and reciprocals for one configuration.
#[derive(Debug, Clone)]
pub struct Model {
    config: ModelConfig,
    inv_p: Vec<f64>,
    table: Arc<PrimeTable>,
}

impl Model {
    pub fn new(config: ModelConfig) -> Result<Self> {
        let config = ModelConfig::new(config.y, config.n_samples, config.seed)?.with_mode(config.mode);
        let table = PrimeTable::shared(config.y as u64);
        let inv_p = table.up_to(config.y).iter().map(|&p| 1.0 / p as f64).collect();
        Ok(Self { config, inv_p, table })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn inv_p(&self) -> &[f64] {
        &self.inv_p
    }

    pub fn primes(&self) -> &[u64] {
        self.table.up_to(self.config.y)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(stream);
        rng
    }

    /// Angle of the prime with the given rank in sample `index`.
    pub fn angle(&self, index: u64, rank: usize) -> f64 {
        if self.config.mode == SamplingMode::AllZero {
            return 0.0;
        }
        let mut rng = self.rng(index);
        rng.set_word_pos(2 * rank as u128);
        angle_from_bits(rng.next_u64())
    }

    pub fn sample(&self, index: u64) -> RandomSample {
        let angles = match self.config.mode {
            SamplingMode::AllZero => vec![0.0; self.inv_p.len()],
            SamplingMode::Uniform => {
                let mut rng = self.rng(index);
                (0..self.inv_p.len()).map(|_| angle_from_bits(rng.next_u64())).collect()
            }
        };
        RandomSample::from_angles(&self.inv_p, angles)
    }

    /// `log L(1,X,y)` for sample `index`; bit-identical to `sample(index).log_value`.
    pub fn log_value(&self, index: u64) -> Complex64 {
        match self.config.mode {
            SamplingMode::AllZero => log_product(&self.inv_p, |_| 0.0),
            SamplingMode::Uniform => {
                let mut rng = self.rng(index);
                log_product(&self.inv_p, |_| angle_from_bits(rng.next_u64()))
            }
        }
    }

    /// `log L` for every sample, in index order.
    pub fn log_values(&self) -> Vec<Complex64> {
        par_map(self.config.n_samples, |i| self.log_value(i as u64))
    }

    /// Sample with angles for `p ≤ z_cut` confined to `(ψ − w, ψ + w)`.
    pub fn conditioned_sample(&self, index: u64, psi: f64, window: f64, z_cut: f64) -> Result<RandomSample> {
        if !(window > 0.0) {
            return domain(format!("window must be positive, got {window}"));
        }
        if !(z_cut <= self.config.y) {
            return domain(format!("z_cut = {z_cut} exceeds y = {}", self.config.y));
        }
        let window = if window > PI {
            log::warn!("window {window} exceeds pi; clipped to pi");
            PI
        } else {
            window
        };
        let conditioned = self.table.up_to(z_cut).len();
        let mut rng = self.rng(index | CONDITIONED_STREAM);
        let angles = (0..self.inv_p.len())
            .map(|rank| {
                let bits = rng.next_u64();
                if rank < conditioned {
                    wrap_angle(psi + window * (1.0 - 2.0 * unit_from_bits(bits)))
                } else {
                    angle_from_bits(bits)
                }
            })
            .collect();
        Ok(RandomSample::from_angles(&self.inv_p, angles))
    }
}

pub fn sample(config: ModelConfig, index: u64) -> Result<RandomSample> {
    if index >= config.n_samples as u64 {
        return domain(format!("sample index {index} out of range 0..{}", config.n_samples));
    }
    Ok(Model::new(config)?.sample(index))
}

pub fn conditioned_sample(config: ModelConfig, index: u64, psi: f64, window: f64, z_cut: f64) -> Result<RandomSample> {
    Model::new(config)?.conditioned_sample(index, psi, window, z_cut)
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub estimate: Complex64,
    pub std_err: f64,
    pub n: usize,
}

/// Mean of `L^{z1} conj(L)^{z2}` over the samples, formed as `exp(z1 log L + z2 conj(log L))`.
pub fn mc_moment(config: ModelConfig, z1: Complex64, z2: Complex64) -> Result<MomentEstimate> {
    let logs = Model::new(config)?.log_values();
    Ok(moment_from_logs(&logs, z1, z2))
}

/// [`mc_moment`] on precomputed `log L` values.
pub fn moment_from_logs(logs: &[Complex64], z1: Complex64, z2: Complex64) -> MomentEstimate {
    let term = |l: Complex64| (z1 * l + z2 * l.conj()).exp();
    let partials = par_chunks(logs.len(), |range| {
        let mut s = ComplexSum::new();
        let mut s2 = NeumaierSum::new();
        for &l in &logs[range] {
            let v = term(l);
            s += v;
            s2 += v.norm_sqr();
        }
        (s, s2)
    });
    let (s, s2) = tree_reduce(&partials, (ComplexSum::new(), NeumaierSum::new()), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = logs.len() as f64;
    let mean = s.value() / n;
    let var = if logs.len() > 1 { ((s2.value() - n * mean.norm_sqr()) / (n - 1.0)).max(0.0) } else { 0.0 };
    MomentEstimate { estimate: mean, std_err: (var / n).sqrt(), n: logs.len() }
}

/// Estimate of `Φ(τ,θ) = Prob(|L| > e^γ τ, |arg L| > θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub tau: f64,
    pub theta: f64,
    pub prob_hat: f64,
    pub std_err: f64,
    /// Main-term prediction, when `τ > 1`.
    pub predicted: Option<f64>,
}

pub fn mc_tail(config: ModelConfig, tau: f64, theta: f64) -> Result<TailEstimate> {
    let logs = Model::new(config)?.log_values();
    tail_from_logs(&logs, tau, theta)
}

/// [`mc_tail`] on precomputed `log L` values.
pub fn tail_from_logs(logs: &[Complex64], tau: f64, theta: f64) -> Result<TailEstimate> {
    if !(tau >= 0.0) || !(theta >= 0.0) {
        return domain(format!("tail needs tau >= 0 and theta >= 0, got ({tau}, {theta})"));
    }
    let log_level = EULER_GAMMA + tau.ln();
    let hits = logs.iter().filter(|l| l.re > log_level && l.im.abs() > theta).count();
    let n = logs.len() as f64;
    let p = hits as f64 / n;
    let predicted = if tau > 1.0 { Some(tail_formula(tau, theta)?) } else { None };
    Ok(TailEstimate { tau, theta, prob_hat: p, std_err: (p * (1.0 - p) / n).sqrt(), predicted })
}

/// Main term of `log(−log Φ(τ,θ))`; see [`tail_formula`].
pub fn tail_log_exponent(tau: f64, theta: f64) -> Result<f64> {
    if !(tau > 1.0) {
        return domain(format!("tail formula needs tau > 1, got {tau}"));
    }
    if !(theta >= 0.0) {
        return domain(format!("tail formula needs theta >= 0, got {theta}"));
    }
    Ok(if theta == 0.0 {
        2f64.ln() + tau - Constants::get().c - 1.0 - tau.ln()
    } else {
        tau + theta * theta * tau / (2.0 * tau.ln()) - tau.ln()
    })
}

/// `exp(−2e^{τ−C−1}/τ)` at `θ = 0` and `exp(−e^{τ+θ²τ/(2 log τ)}/τ)` for `θ > 0`;
/// lower-order corrections are not included.
pub fn tail_formula(tau: f64, theta: f64) -> Result<f64> {
    Ok((-tail_log_exponent(tau, theta)?.exp()).exp())
}

/// Counts over a stream of samples for the hard argument bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgumentScan {
    pub samples: usize,
    pub p_y: f64,
    pub max_abs_arg: f64,
    /// Samples with `|arg| > P_y`.
    pub arg_violations: usize,
    /// Samples with `L > −φ²/(2P_y) + 1e−9(1+φ²)`.
    pub deficit_violations: usize,
    /// Largest `L + φ²/(2P_y)` seen.
    pub worst_margin: f64,
}

/// Streams all samples and checks `|arg L| ≤ P_y` and `L ≤ −φ²/(2P_y)`.
pub fn argument_scan(config: ModelConfig) -> Result<ArgumentScan> {
    let model = Model::new(config)?;
    let p_y = crate::euler::py(config.y)?;
    let partials = par_chunks(config.n_samples, |range| {
        let mut out = (0.0f64, 0usize, 0usize, f64::NEG_INFINITY);
        for i in range {
            let l = model.log_value(i as u64);
            let phi = l.im;
            let deficit = l.re - p_y;
            let margin = deficit + phi * phi / (2.0 * p_y);
            out.0 = out.0.max(phi.abs());
            out.1 += usize::from(phi.abs() > p_y);
            out.2 += usize::from(margin > 1e-9 * (1.0 + phi * phi));
            out.3 = out.3.max(margin);
        }
        out
    });
    let (max_abs_arg, arg_violations, deficit_violations, worst_margin) =
        tree_reduce(&partials, (0.0, 0, 0, f64::NEG_INFINITY), |a, b| {
            (a.0.max(b.0), a.1 + b.1, a.2 + b.2, a.3.max(b.3))
        });
    Ok(ArgumentScan { samples: config.n_samples, p_y, max_abs_arg, arg_violations, deficit_violations, worst_margin })
}

/// Behaviour of the block sum `S = Σ_{y<p≤4y} X(p)/p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    /// Fraction of samples with `|S| > 1/log y`.
    pub exceedance: f64,
    /// Sample mean of `|S|²`.
    pub mean_abs_sq: f64,
    /// Standard error of `mean_abs_sq`.
    pub std_err: f64,
    /// `E|S|² = Σ_{y<p≤4y} 1/p²`.
    pub expected_abs_sq: f64,
}

/// Draws `S` for every sample; the primes beyond `y` continue the rank numbering of
/// each sample's stream.
pub fn tail_sum(config: ModelConfig) -> Result<TailSum> {
    let model = Model::new(config)?;
    let y = config.y;
    let table = PrimeTable::shared((4.0 * y) as u64);
    let first = table.up_to(y).len();
    let block: Vec<f64> = table.up_to(4.0 * y)[first..].iter().map(|&p| 1.0 / p as f64).collect();
    let level = 1.0 / y.ln();
    let partials = par_chunks(config.n_samples, |range| {
        let mut hits = 0usize;
        let mut sq = NeumaierSum::new();
        let mut quad = NeumaierSum::new();
        for i in range {
            let mut rng = model.rng(i as u64);
            rng.set_word_pos(2 * first as u128);
            let mut acc = ComplexSum::new();
            for &q in &block {
                acc += Complex64::from_polar(q, angle_from_bits(rng.next_u64()));
            }
            let m2 = acc.value().norm_sqr();
            hits += usize::from(m2.sqrt() > level);
            sq += m2;
            quad += m2 * m2;
        }
        (hits, sq, quad)
    });
    let (hits, sq, quad) =
        tree_reduce(&partials, (0, NeumaierSum::new(), NeumaierSum::new()), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let n = config.n_samples as f64;
    let mean = sq.value() / n;
    let var = (quad.value() / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    let expected: NeumaierSum = block.iter().map(|q| q * q).collect();
    Ok(TailSum {
        exceedance: hits as f64 / n,
        mean_abs_sq: mean,
        std_err: (var / n).sqrt(),
        expected_abs_sq: expected.value(),
    })
}
