//! Exact integer arithmetic: factorization, divisor sums, modular inverses,
//! CRT, 2-adic square roots and Hensel lifting of sums of two squares.

mod factor;
mod lift;
mod modular;

pub use factor::{
    factorize, first_primes, is_prime, primes_up_to, sigma, sigma_prime_power, Factorization,
    TRIAL_LIMIT,
};
pub use lift::{
    lift_second_square, log2_sqrt_floor, two_adic_sqrt_8n1, two_squares_base_all,
    two_squares_mod_pk, TwoAdicRoot,
};
pub use modular::{crt_combine, gcd, mod_inverse, Congruence};

pub(crate) use factor::small_primes;
