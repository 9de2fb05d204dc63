//! Composite Gauss–Legendre quadrature with panel doubling.

use std::f64::consts::PI;

use crate::reduce::NeumaierSum;

/// Nodes and weights of an n-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over `[a, b]` split into `panels` equal panels.
    pub fn composite(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = NeumaierSum::new();
        for k in 0..panels {
            let mid = a + (k as f64 + 0.5) * h;
            let half = 0.5 * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += w * half * f(mid + half * x);
            }
        }
        acc.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of a refined quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub value: f64,
    /// `|I(2m) − I(m)|` at the final refinement.
    pub delta: f64,
    pub panels: usize,
}

/// Double the panel count until two successive estimates differ by at most `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Refined {
    let rule = GaussLegendre::new(16);
    let mut panels = 1;
    let mut prev = rule.composite(&f, a, b, panels);
    loop {
        panels *= 2;
        let next = rule.composite(&f, a, b, panels);
        let delta = (next - prev).abs();
        if delta <= tol || panels >= 1 << 16 {
            return Refined { value: next, delta, panels };
        }
        prev = next;
    }
}
