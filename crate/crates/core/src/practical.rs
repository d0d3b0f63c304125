//! Practical numbers: the ordered-factorization characterization, a
//! definitional subset-sum oracle, and a generator for all practical numbers
//! up to a bound.
//!
//! `n = 2^a1 p2^a2 ... pk^ak` (primes ascending) is practical iff `p1 = 2`
//! and every later `pj <= sigma(p1^a1 ... p(j-1)^a(j-1)) + 1`. The number 1 is
//! practical.

use std::io::{Read, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::arith::{factorize, is_prime, sigma_prime_power, small_primes};
use crate::bits::{read_bitmap, write_bitmap, BitmapHeader, BitmapKind, Bitset};
use crate::error::{invalid, Error, Result};

/// Largest argument accepted by [`is_practical_by_definition`].
pub const ORACLE_BOUND: u64 = 100_000;

/// Default cap for [`generate_practicals`].
pub const MAX_SIEVE_BOUND: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PracticalityReport {
    pub n: u64,
    pub practical: bool,
    /// The first prime violating the characterization.
    pub failing_prime: Option<u64>,
    /// Running `sigma` of the prefix after each admissible distinct prime.
    pub sigma_prefixes: Vec<u128>,
}

/// Applies the characterization to the full factorization of `n`.
pub fn is_practical(n: u64) -> Result<PracticalityReport> {
    if n == 0 {
        return Err(invalid("0 is not a natural number"));
    }
    let f = factorize(n)?;
    let mut sigma: u128 = 1;
    let mut sigma_prefixes = Vec::with_capacity(f.factors().len());
    for &(p, e) in f.factors() {
        if p as u128 > sigma + 1 {
            return Ok(PracticalityReport {
                n,
                practical: false,
                failing_prime: Some(p),
                sigma_prefixes,
            });
        }
        sigma = sigma
            .checked_mul(sigma_prime_power(p, e)?)
            .ok_or(Error::Overflow("sigma prefix"))?;
        sigma_prefixes.push(sigma);
    }
    Ok(PracticalityReport { n, practical: true, failing_prime: None, sigma_prefixes })
}

/// Boolean practicality test that stops trial division as soon as the next
/// candidate prime exceeds `sigma + 1`.
pub fn is_practical_quick(n: u64) -> bool {
    if n <= 2 {
        return n >= 1;
    }
    if n % 2 == 1 {
        return false;
    }
    let mut rest = n;
    let mut sigma: u128 = 1;
    for &p in small_primes() {
        if rest == 1 {
            return true;
        }
        if p as u128 > sigma + 1 {
            return false;
        }
        if p * p > rest {
            return rest as u128 <= sigma + 1;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            // sigma of a u64 prefix always fits in 128 bits
            sigma *= sigma_prime_power(p, e).expect("prime power of a u64 divisor");
        }
    }
    if rest == 1 {
        return true;
    }
    // Every prime factor of `rest` is beyond the trial-division table.
    let f = factorize(rest).expect("rest > 0");
    for &(p, e) in f.factors() {
        if p as u128 > sigma + 1 {
            return false;
        }
        sigma *= sigma_prime_power(p, e).expect("prime power of a u64 divisor");
    }
    true
}

/// Decides practicality straight from the definition: every `1..=n` must be a
/// sum of distinct divisors of `n`. Subset sums are tracked in a bit array.
pub fn is_practical_by_definition(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(invalid("0 is not a natural number"));
    }
    if n > ORACLE_BOUND {
        return Err(invalid(format!("oracle bound is {ORACLE_BOUND}, got {n}")));
    }
    let n = n as usize;
    let mut divisors = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            divisors.push(d);
            if d * d != n {
                divisors.push(n / d);
            }
        }
        d += 1;
    }
    divisors.sort_unstable();
    let words = (n + 1).div_ceil(64);
    let mut reach = vec![0u64; words];
    reach[0] = 1;
    for &d in &divisors {
        // reach |= reach << d, processed from the top so sources are unshifted
        let (q, r) = (d / 64, d % 64);
        for w in (q..words).rev() {
            let hi = reach[w - q];
            let lo = if r != 0 && w > q { reach[w - q - 1] >> (64 - r) } else { 0 };
            reach[w] |= if r == 0 { hi } else { (hi << r) | lo };
        }
    }
    Ok((1..=n).all(|i| (reach[i / 64] >> (i % 64)) & 1 == 1))
}

/// Bit array over `0..=bound`; bit `i` set iff `i` is practical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PracticalSieve {
    bound: u64,
    bits: Bitset,
}

impl PracticalSieve {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn bits(&self) -> &Bitset {
        &self.bits
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= self.bound && self.bits.get(n as usize)
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones().map(|i| i as u64)
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let header =
            BitmapHeader { kind: BitmapKind::Practical, allow_zero: false, s: 0, bound: self.bound };
        write_bitmap(w, &header, &self.bits)
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let (header, bits) = read_bitmap(r)?;
        if header.kind != BitmapKind::Practical {
            return Err(Error::Format("not a practical-number bitmap".into()));
        }
        if bits.len() as u64 != header.bound + 1 {
            return Err(Error::Format("length does not match bound".into()));
        }
        Ok(PracticalSieve { bound: header.bound, bits })
    }
}

#[derive(Clone, Copy)]
struct Node {
    value: u64,
    sigma: u128,
    last_prime: u64,
}

struct Generator<'a> {
    bound: u64,
    primes: &'a [u64],
    bits: &'a [AtomicU64],
}

impl Generator<'_> {
    fn mark(&self, v: u64) {
        self.bits[(v >> 6) as usize].fetch_or(1 << (v & 63), Ordering::Relaxed);
    }

    /// Calls `f` on each admissible child of `node`.
    fn for_each_child(&self, node: Node, mut f: impl FnMut(Node)) {
        let limit = (node.sigma + 1).min((self.bound / node.value) as u128) as u64;
        let mut visit = |p: u64| {
            let mut value = node.value;
            let mut e = 0;
            while let Some(v) = value.checked_mul(p).filter(|&v| v <= self.bound) {
                value = v;
                e += 1;
                let sp = sigma_prime_power(p, e).expect("bounded by u64 value");
                f(Node { value, sigma: node.sigma * sp, last_prime: p });
            }
        };
        let start = self.primes.partition_point(|&q| q <= node.last_prime);
        for &p in &self.primes[start..] {
            if p > limit {
                return;
            }
            visit(p);
        }
        // Past the prime table: only reachable for pathological bounds.
        let table_max = self.primes.last().copied().unwrap_or(1);
        let mut c = table_max.max(node.last_prime) + 1;
        while c <= limit {
            if is_prime(c) {
                visit(c);
            }
            c += 1;
        }
    }

    fn dfs(&self, node: Node) {
        self.mark(node.value);
        self.for_each_child(node, |child| self.dfs(child));
    }
}

/// All practical numbers up to `bound`, with the default size cap.
pub fn generate_practicals(bound: u64) -> Result<PracticalSieve> {
    generate_practicals_capped(bound, MAX_SIEVE_BOUND)
}

/// Generates practical numbers by walking admissible factorizations from 1:
/// each step appends a prime larger than all used so far and at most
/// `sigma + 1`, raised to every exponent that keeps the value within `bound`.
pub fn generate_practicals_capped(bound: u64, cap: u64) -> Result<PracticalSieve> {
    if bound == 0 {
        return Err(invalid("bound must be positive"));
    }
    if bound > cap {
        return Err(invalid(format!("bound {bound} exceeds the sieve cap {cap}")));
    }
    let len = usize::try_from(bound + 1).map_err(|_| Error::Resource("bound too large".into()))?;
    let n_words = len.div_ceil(64);
    let mut atomic = Vec::new();
    atomic
        .try_reserve_exact(n_words)
        .map_err(|e| Error::Resource(format!("practical sieve of {len} bits: {e}")))?;
    atomic.resize_with(n_words, || AtomicU64::new(0));

    // A child prime satisfies p <= sigma(v) + 1 and p <= bound / v, so
    // p^2 <= bound * (sigma(v) + 1) / v; sigma(v) / v stays below 7 far past
    // any supported bound. Larger primes fall back to direct testing.
    let prime_limit = ((bound as u128 * 8).isqrt() as u64 + 2).min(bound);
    let primes = if prime_limit < crate::arith::TRIAL_LIMIT {
        let t = small_primes();
        &t[..t.partition_point(|&p| p <= prime_limit)]
    } else {
        small_primes()
    };
    let gen = Generator { bound, primes, bits: &atomic };

    // Expand two levels sequentially, then hand the subtrees to workers.
    let root = Node { value: 1, sigma: 1, last_prime: 1 };
    gen.mark(1);
    let mut frontier = Vec::new();
    gen.for_each_child(root, |child| {
        gen.mark(child.value);
        gen.for_each_child(child, |grandchild| frontier.push(grandchild));
    });
    frontier.par_iter().for_each(|&node| gen.dfs(node));

    let words = atomic.into_iter().map(AtomicU64::into_inner).collect();
    Ok(PracticalSieve { bound, bits: Bitset::from_words(words, len) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize, sigma};
    use rand::{Rng, SeedableRng};

    #[test]
    fn report_examples() {
        let r = is_practical(1).unwrap();
        assert!(r.practical && r.failing_prime.is_none() && r.sigma_prefixes.is_empty());
        assert!(is_practical(2).unwrap().practical);
        let r = is_practical(14).unwrap();
        assert!(!r.practical);
        assert_eq!(r.failing_prime, Some(7));
        assert_eq!(r.sigma_prefixes, vec![3]);
        let r = is_practical(20).unwrap();
        assert!(r.practical);
        assert_eq!(r.sigma_prefixes, vec![7, 42]);
        assert!(is_practical(0).is_err());
    }

    #[test]
    fn odd_smallest_prime_is_the_failure() {
        for n in [3u64, 9, 15, 49, 2671, 3 * 5 * 7 * 11] {
            let r = is_practical(n).unwrap();
            assert!(!r.practical);
            assert_eq!(r.failing_prime, factorize(n).unwrap().smallest_prime());
        }
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(is_practical_by_definition(6), Ok(true));
        assert_eq!(is_practical_by_definition(10), Ok(false));
        assert_eq!(is_practical_by_definition(3), Ok(false));
        assert_eq!(is_practical_by_definition(1), Ok(true));
        assert_eq!(is_practical_by_definition(20), Ok(true));
        assert!(is_practical_by_definition(ORACLE_BOUND + 1).is_err());
        assert!(is_practical_by_definition(ORACLE_BOUND).is_ok());
    }

    #[test]
    fn characterization_matches_oracle() {
        for n in 1..=20_000u64 {
            let by_def = is_practical_by_definition(n).unwrap();
            assert_eq!(is_practical(n).unwrap().practical, by_def, "n = {n}");
            assert_eq!(is_practical_quick(n), by_def, "n = {n}");
        }
    }

    #[test]
    fn quick_matches_report_on_wide_inputs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            // Products of small primes are practical far more often than
            // uniform samples, which keeps both branches exercised.
            let mut n: u64 = 1;
            while let Some(v) = n.checked_mul(rng.gen_range(2..40)) {
                if rng.gen_bool(0.15) {
                    break;
                }
                n = v;
            }
            assert_eq!(is_practical_quick(n), is_practical(n).unwrap().practical, "n = {n}");
            let m: u64 = rng.gen_range(1..u64::MAX);
            assert_eq!(is_practical_quick(m), is_practical(m).unwrap().practical, "m = {m}");
        }
        let big_prime = 2_305_843_009_213_693_951u64; // 2^61 - 1
        assert!(is_practical_quick(2 * big_prime) == is_practical(2 * big_prime).unwrap().practical);
        let n = (1u64 << 40) * 1_000_003;
        assert!(is_practical_quick(n) && is_practical(n).unwrap().practical);
    }

    #[test]
    fn sieve_small_bounds() {
        let s = generate_practicals(30).unwrap();
        let got: Vec<u64> = s.iter().collect();
        assert_eq!(got, vec![1, 2, 4, 6, 8, 12, 16, 18, 20, 24, 28, 30]);
        let s = generate_practicals(1).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1]);
        assert!(generate_practicals(0).is_err());
        assert!(generate_practicals_capped(1000, 999).is_err());
        let s = generate_practicals(2671).unwrap();
        assert!(!s.contains(2671));
        assert!(s.contains(2670) == is_practical_quick(2670));
    }

    #[test]
    fn sieve_matches_characterization() {
        let s = generate_practicals(1_000_000).unwrap();
        for i in 0..=1000u64 {
            assert_eq!(s.contains(i), i >= 1 && is_practical_quick(i), "i = {i}");
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let i = rng.gen_range(1..=1_000_000u64);
            assert_eq!(s.contains(i), is_practical(i).unwrap().practical, "i = {i}");
        }
        assert!(s.contains(1) && s.contains(2));
        assert!(s.iter().all(|n| n <= 2 || n % 2 == 0));
    }

    #[test]
    fn sieve_is_thread_count_independent() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| generate_practicals(300_000).unwrap());
        let b = four.install(|| generate_practicals(300_000).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn sieve_file_round_trip() {
        let s = generate_practicals(5000).unwrap();
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert_eq!(PracticalSieve::read_from(&buf[..]).unwrap(), s);
    }

    #[test]
    fn product_closure() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let practicals: Vec<u64> = generate_practicals(10_000).unwrap().iter().collect();
        for _ in 0..1000 {
            let m = practicals[rng.gen_range(0..practicals.len())];
            let sm = sigma(&factorize(m).unwrap()).unwrap() as u64;
            let n = rng.gen_range(1..=sm + 1);
            assert!(is_practical(m * n).unwrap().practical, "m = {m}, n = {n}");
        }
    }

    #[test]
    fn coprime_to_twelve_practicals_are_one_and_two() {
        let s = generate_practicals(1_000_000).unwrap();
        let offenders: Vec<u64> = s.iter().filter(|q| q % 3 != 0 && q % 4 != 0).collect();
        assert_eq!(offenders, vec![1, 2]);
    }
}
