use edgezeta::divisor::*;
use edgezeta::reduce::NeumaierSum;
use edgezeta::Complex64;
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn order() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #[test]
    fn dz_is_multiplicative(m in 1u64..1000, n in 1u64..1000, z in order()) {
        prop_assume!(gcd(m, n) == 1);
        let lhs = dz(m * n, z).unwrap();
        let rhs = dz(m, z).unwrap() * dz(n, z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn conjugate_orders_give_positive_moments(re in 0.1f64..3.0, im in -2.0f64..2.0, y in 2.0f64..200.0) {
        let z = Complex64::new(re, im);
        let m = moment_series(z, z.conj(), Truncation::Finite(y), 1e-12).unwrap();
        prop_assert!(m.value.im.abs() <= 1e-10 * m.value.re);
        prop_assert!(m.value.re > 0.0);
    }

    #[test]
    fn ratio_decreases_in_shift(k in 20.0f64..120.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (r1, r2) = (a.min(b) * k.sqrt(), a.max(b) * k.sqrt());
        prop_assume!(r2 - r1 > 1e-3);
        let x = ratio_shifted(k, r1, 1e-9).unwrap();
        let y = ratio_shifted(k, r2, 1e-9).unwrap();
        prop_assert!(y.log_ratio < x.log_ratio);
    }

    #[test]
    fn smoothed_sums_stay_below_cap(k in 1u32..5, z in 2.0f64..500.0) {
        let s = smoothed_divisor_sum(k, SmoothingParam::new(z).unwrap(), 20_000).unwrap();
        prop_assert!(s.within_cap, "{} > {}", s.value, s.cap);
    }
}

#[test]
fn quadrature_agrees_with_series() {
    let tol = 1e-12;
    for p in [2u64, 3, 5] {
        for k in [1.0, 2.0, 5.0, 10.0, 50.0] {
            let s = log_local_factor_real(p, k, k, tol).unwrap();
            let q = local_factor_quadrature(p, k, tol).unwrap();
            let rel = ((s.log_value.re - q.log_value.re).exp() - 1.0).abs();
            assert!(rel <= 2.0 * tol, "p={p} k={k} rel={rel}");
            let c = local_factor_series(p, Complex64::new(k, 0.0), Complex64::new(k, 0.0), tol).unwrap();
            assert!((c.value.re / s.value.re - 1.0).abs() <= 2.0 * tol);
        }
    }
}

#[test]
fn shifted_quadrature_agrees_with_series() {
    for p in [2u64, 3, 7] {
        for (k, r) in [(10.0, 1.0), (50.0, 3.0), (200.0, 14.0)] {
            let s = log_local_factor_real(p, k - r, k + r, 1e-13).unwrap();
            let q = shifted_factor_quadrature(p, k, r, 1e-13).unwrap();
            assert!((s.log_value.re - q.log_value.re).abs() < 1e-10, "p={p} k={k} r={r}");
        }
    }
}

#[test]
fn large_order_quadrature_route() {
    // equal orders above 1000 at small primes take the circle quadrature
    let k = 5000.0;
    let f = local_factor(3, Complex64::new(k, 0.0), Complex64::new(k, 0.0), 1e-12).unwrap();
    assert_eq!(f.path, FactorPath::Quadrature);
    let s = log_local_factor_real(3, k, k, 1e-12).unwrap();
    assert!((f.log_value.re - s.log_value.re).abs() < 1e-10);
}

#[test]
fn partial_sums_increase_to_the_product() {
    let (z1, z2) = (1.5, 2.0);
    let full =
        moment_series(Complex64::new(z1, 0.0), Complex64::new(z2, 0.0), Truncation::Infinite, 1e-12).unwrap().value.re;
    let mut last = 0.0;
    let mut acc = NeumaierSum::new();
    let mut next_check = 10;
    for n in 1..=100_000u64 {
        let a = dz(n, Complex64::new(z1, 0.0)).unwrap().re;
        let b = dz(n, Complex64::new(z2, 0.0)).unwrap().re;
        acc += a * b / (n as f64 * n as f64);
        if n == next_check {
            let v = acc.value();
            assert!(v > last && v < full);
            last = v;
            next_check *= 10;
        }
    }
    assert!(full - last < 1e-3);
}

#[test]
fn prop_3_2_example_at_k_200() {
    let k: f64 = 200.0;
    let c0 = edgezeta::arith::Constants::get().c0;
    let r: f64 = 3.0;
    let x = ratio_shifted(k, r, 1e-9).unwrap();
    let envelope = r * r / (k * k.ln().sqrt()) + r.powi(4) / (k * k);
    assert!((x.log_ratio + r * r * (k.ln().ln() + c0) / k).abs() <= 10.0 * envelope);
    assert!((x.log_predicted + r * r * (k.ln().ln() + c0) / k).abs() < 1e-15);
}
