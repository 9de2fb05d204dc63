use edgezeta::arith::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn factorisation_multiplies_back(n in 1u64..10_000_000) {
        let f = factorize(n);
        prop_assert_eq!(f.iter().map(|&(p, a)| p.pow(a)).product::<u64>(), n);
        prop_assert!(f.iter().all(|&(p, _)| is_prime(p)));
        prop_assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn mobius_is_multiplicative(m in 1u64..5000, n in 1u64..5000) {
        let g = (1..=m.min(n)).rev().find(|d| m % d == 0 && n % d == 0).unwrap();
        prop_assume!(g == 1);
        prop_assert_eq!(mobius(m * n), mobius(m) * mobius(n));
    }

    #[test]
    fn sieve_agrees_with_trial_division(limit in 2u64..20_000) {
        let t = sieve(limit).unwrap();
        let direct: Vec<u64> = (2..=limit).filter(|&n| is_prime(n)).collect();
        prop_assert_eq!(t.primes(), &direct[..]);
    }

    #[test]
    fn smooth_numbers_have_small_factors(y in 2.0f64..40.0, bound in 1u64..5000) {
        let s = enumerate_smooth(y, bound).unwrap();
        let direct: Vec<u64> = (1..=bound)
            .filter(|&n| factorize(n).iter().all(|&(p, _)| p as f64 <= y))
            .collect();
        prop_assert_eq!(s, direct);
    }
}

#[test]
fn segmented_count_matches_sieve() {
    for (limit, seg) in [(1_000_000u64, 1 << 12), (999_983, 1000), (10, 3)] {
        assert_eq!(count_primes_segmented(limit, seg).unwrap(), sieve(limit).unwrap().len() as u64);
    }
}

#[test]
fn prime_zeta_tail_decomposition() {
    let t = sieve(1000).unwrap();
    let head: f64 = t.primes().iter().map(|&p| (p as f64).powi(-2)).sum();
    assert!((head + prime_zeta_tail(2.0, t.primes()) - prime_zeta(2.0)).abs() < 1e-14);
}
