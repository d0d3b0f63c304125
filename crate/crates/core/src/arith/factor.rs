use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Trial division covers every prime below this limit; anything left over is
/// handled by Miller-Rabin and Pollard rho.
pub const TRIAL_LIMIT: u64 = 1 << 21;

/// Ordered prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from explicit `(prime, exponent)` pairs,
    /// checking every invariant.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut value: u64 = 1;
        let mut last = 1;
        for &(p, e) in &factors {
            if p <= last {
                return Err(Error::InvalidArgument(
                    "primes must be strictly increasing".into(),
                ));
            }
            if e == 0 {
                return Err(Error::InvalidArgument("exponents must be positive".into()));
            }
            if !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            let pe = p.checked_pow(e).ok_or(Error::Overflow("factorization value"))?;
            value = value
                .checked_mul(pe)
                .ok_or(Error::Overflow("factorization value"))?;
            last = p;
        }
        Ok(Factorization { value, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn smallest_prime(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }
}

fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// All primes `p <= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < TRIAL_LIMIT {
        let table = small_primes();
        let end = table.partition_point(|&p| p <= limit);
        return table[..end].to_vec();
    }
    sieve_primes(limit)
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    let table = small_primes();
    if count <= table.len() {
        return table[..count].to_vec();
    }
    let mut out = table.to_vec();
    let mut c = *out.last().unwrap() + 2;
    while out.len() < count {
        if is_prime(c) {
            out.push(c);
        }
        c += 2;
    }
    out
}

pub(crate) fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| sieve_primes(TRIAL_LIMIT - 1))
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    // This base set is a proven witness set below 2^64.
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// Brent's variant; `n` odd composite with no factor below TRIAL_LIMIT.
fn pollard_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Factorizes `n >= 1`. `factorize(1)` has no factors.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot factorize 0".into()));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        if rest < TRIAL_LIMIT * TRIAL_LIMIT {
            // No factor below sqrt(rest) survived trial division.
            factors.push((rest, 1));
        } else {
            let mut big = Vec::new();
            split_large(rest, &mut big);
            big.sort_unstable();
            for p in big {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }
    Ok(Factorization { value: n, factors })
}

/// `(p^(e+1) - 1) / (p - 1)` with overflow detection.
pub fn sigma_prime_power(p: u64, e: u32) -> Result<u128> {
    let mut term: u128 = 1;
    let mut acc: u128 = 1;
    for _ in 0..e {
        term = term
            .checked_mul(p as u128)
            .ok_or(Error::Overflow("sigma"))?;
        acc = acc.checked_add(term).ok_or(Error::Overflow("sigma"))?;
    }
    Ok(acc)
}

/// Sum of divisors of the factored value.
pub fn sigma(f: &Factorization) -> Result<u128> {
    f.factors.iter().try_fold(1u128, |acc, &(p, e)| {
        acc.checked_mul(sigma_prime_power(p, e)?)
            .ok_or(Error::Overflow("sigma"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().is_one());
        assert_eq!(factorize(360).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(2671).unwrap().factors(), &[(2671, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_large_semiprimes() {
        let p = 4_294_967_291u64; // largest prime below 2^32
        let q = 2_147_483_647u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors(), &[(q, 1), (p, 1)]);
        let big = 9_223_372_036_854_775_783u64; // prime just below 2^63
        assert_eq!(factorize(big).unwrap().factors(), &[(big, 1)]);
        let sq = 3_037_000_493u64; // prime, square just below 2^63
        assert_eq!(factorize(sq * sq).unwrap().factors(), &[(sq, 2)]);
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let table = sieve_primes(100_000);
        let mut it = table.iter().peekable();
        for n in 0..=100_000u64 {
            let expected = it.peek() == Some(&&n);
            if expected {
                it.next();
            }
            assert_eq!(is_prime(n), expected, "n = {n}");
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&factorize(1).unwrap()).unwrap(), 1);
        assert_eq!(sigma(&factorize(12).unwrap()).unwrap(), 28);
        assert_eq!(sigma(&factorize(16).unwrap()).unwrap(), 31);
    }

    #[test]
    fn sigma_detects_overflow() {
        assert!(sigma_prime_power(2, 127).is_ok());
        assert_eq!(sigma_prime_power(2, 128), Err(Error::Overflow("sigma")));
        assert!(sigma_prime_power(3, 81).is_err());
    }

    #[test]
    fn from_factors_validates() {
        assert!(Factorization::from_factors(vec![(3, 1), (2, 1)]).is_err());
        assert!(Factorization::from_factors(vec![(4, 1)]).is_err());
        assert!(Factorization::from_factors(vec![(2, 0)]).is_err());
        assert_eq!(
            Factorization::from_factors(vec![(2, 2), (7, 1)]).unwrap().value(),
            28
        );
    }

    fn naive_sigma(n: u64) -> u128 {
        (1..=n).filter(|d| n % d == 0).map(|d| d as u128).sum()
    }

    proptest! {
        #[test]
        fn factorize_round_trip(n in 1u64..=1_000_000_000) {
            let f = factorize(n).unwrap();
            let mut prod = 1u64;
            let mut last = 1;
            for &(p, e) in f.factors() {
                prop_assert!(p > last && e >= 1 && is_prime(p));
                prod *= p.pow(e);
                last = p;
            }
            prop_assert_eq!(prod, n);
        }

        #[test]
        fn factorize_round_trip_wide(n in 1u64..(1u64 << 63)) {
            let f = factorize(n).unwrap();
            let prod = f.factors().iter().fold(1u128, |a, &(p, e)| a * (p as u128).pow(e));
            prop_assert_eq!(prod, n as u128);
        }

        #[test]
        fn sigma_matches_divisor_sum(n in 1u64..5000) {
            prop_assert_eq!(sigma(&factorize(n).unwrap()).unwrap(), naive_sigma(n));
        }
    }

    #[test]
    fn sigma_is_multiplicative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 10_000 {
            let a = rng.gen_range(1..=1_000_000u64);
            let b = rng.gen_range(1..=1_000_000u64);
            if gcd(a, b) != 1 {
                continue;
            }
            let sa = sigma(&factorize(a).unwrap()).unwrap();
            let sb = sigma(&factorize(b).unwrap()).unwrap();
            assert_eq!(sigma(&factorize(a * b).unwrap()).unwrap(), sa * sb);
            checked += 1;
        }
    }
}
