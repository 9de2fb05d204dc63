//! Primes, smooth numbers, special functions and the shared constants.

mod constants;
pub mod ddouble;
mod primes;
pub mod quad;
mod special;

pub use constants::{bessel_head_integrand, constant_c, constant_c_parts, mertens_c0, Constants, EULER_GAMMA};
pub use primes::{count_primes_segmented, enumerate_smooth, factorize, is_prime, mobius, sieve, PrimeTable};
pub(crate) use special::bernoulli_over_factorial;
pub use special::{digamma, log_bessel_i0, prime_zeta, prime_zeta_tail, zeta_minus_one, zeta_real};
