//! The identity suite behind the `verify` command.

use std::f64::consts::PI;

use edgezeta::arith::zeta_real;
use edgezeta::dirichlet::{build_table, l1_all, l1_direct};
use edgezeta::divisor::{local_factor_quadrature, local_factor_series, moment_series, Truncation};
use edgezeta::euler::zeta_line_checked;
use edgezeta::randmodel::{mc_moment, ModelConfig};
use edgezeta::torus::{box_measure_on, min_linear_form, single_prime_closed_form, BoxSpec};
use num_complex::Complex64;

use crate::error::CliResult;

/// One line of the suite: passes when `|value − reference| ≤ tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, reference: f64, tolerance: f64) -> Check {
    let pass = (value - reference).abs() <= tolerance;
    Check { name, value, reference, tolerance, pass }
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn run(seed: u64, n_samples: usize) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for p in [2u64, 3, 5] {
        for k in [1.0, 2.0, 5.0, 10.0, 50.0] {
            let kz = Complex64::new(k, 0.0);
            let q = local_factor_quadrature(p, k, 1e-13)?.value.re;
            let s = local_factor_series(p, kz, kz, 1e-14)?.value.re;
            worst = worst.max((q - s).abs() / s);
        }
    }
    out.push(check("local factor quadrature vs series, worst relative gap", worst, 0.0, 1e-8));
    let f21 = local_factor_quadrature(2, 1.0, 1e-14)?.value.re;
    out.push(check("local factor p=2 k=1 by quadrature", f21, 4.0 / 3.0, 1e-12));

    let z2 = zeta_real(2.0, 1e-15)?;
    let m11 = moment_series(ONE, ONE, Truncation::Infinite, 1e-11)?.value.re;
    out.push(check("moment series (1,1) over all primes", m11, z2, 1e-8));
    let m22 = moment_series(2.0 * ONE, 2.0 * ONE, Truncation::Infinite, 1e-11)?.value.re;
    out.push(check("moment series (2,2) over all primes", m22, z2.powi(4) / zeta_real(4.0, 1e-15)?, 1e-6));

    let config = ModelConfig::new(10.0, n_samples, seed)?;
    let oracle = moment_series(ONE, ONE, Truncation::Finite(10.0), 1e-14)?.value.re;
    let est = mc_moment(config, ONE, ONE)?;
    out.push(check("random model E|L|^2 at y=10 (3 std errors)", est.estimate.re, oracle, 3.0 * est.std_err));

    let l3 = l1_all(&build_table(3)?);
    out.push(check(
        "L(1, chi mod 3) real character",
        l3.get(l3.quadratic_exponent()).re,
        PI / (3.0 * 3f64.sqrt()),
        1e-9,
    ));
    let l5 = l1_all(&build_table(5)?);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    out.push(check(
        "L(1, chi mod 5) real character",
        l5.get(l5.quadratic_exponent()).re,
        2.0 / 5f64.sqrt() * golden.ln(),
        1e-9,
    ));
    let table = build_table(101)?;
    let all = l1_all(&table);
    let order = table.order();
    let pairing = (1..order).map(|e| (all.get(e) - all.get(order - e).conj()).norm()).fold(0.0, f64::max);
    out.push(check("L(1, chi) conjugate pairing mod 101", pairing, 0.0, 1e-12));
    let gap = (1..order).map(|e| (all.get(e) - l1_direct(&table, e)).norm()).fold(0.0, f64::max);
    out.push(check("L(1, chi) transform vs direct sum mod 101", gap, 0.0, 1e-10));

    let z = zeta_line_checked(10.0, 1e-11)?;
    out.push(check("zeta(1+10i) alternating vs Euler-Maclaurin", z.discrepancy, 0.0, 1e-10));

    let lf = min_linear_form(2, 1)?;
    let value = if lf.witness == [-1, 1] { lf.min_value() } else { f64::NAN };
    out.push(check("min |a log 2 + b log 3| over |a|,|b| <= 1", value, 1.5f64.ln(), 1e-15));

    let (lo, hi, a, b) = (1000.0, 3000.0, 0.2, 0.7);
    let swept = box_measure_on(lo, hi, 2.0, &BoxSpec::new(vec![(a, b)])?)?.measure;
    out.push(check(
        "single prime box measure vs closed form",
        swept,
        single_prime_closed_form(2, a, b, lo, hi),
        1e-9 * hi,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let checks = run(42, 20_000).unwrap();
        for c in &checks {
            assert!(c.pass, "{c:?}");
        }
        assert!(checks.len() >= 10);
    }

    #[test]
    fn nan_fails() {
        assert!(!check("x", f64::NAN, 0.0, 1.0).pass);
    }
}
