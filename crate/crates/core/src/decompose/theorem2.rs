//! The practical-plus-two-s-gonal construction: the constant bounding
//! `2 P_s(2 p x) / x^2`, analysis of the primorial the construction needs,
//! and an executable search-mode version of the pipeline.

use serde::{Deserialize, Serialize};

use super::pairs::{all_pair_solutions, pair_mod_pk_alternatives, special_prime, PairCongruence};
use crate::arith::{factorize, first_primes, mod_inverse, primes_up_to, sigma};
use crate::error::{invalid, Error, Result};
use crate::polygonal::polygonal;
use crate::practical::{is_practical, is_practical_quick};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ZETA_2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Default number of residue combinations tried for each exponent `k`.
pub const DEFAULT_MAX_COMBINATIONS: usize = 1 << 14;

/// Smallest integer `A` with `2 P_s(2 p x) <= A x^2` for all `x >= 1`, where
/// `p = special_prime(s)`: the ratio is `4(s-2)p^2 - 2(s-4)p/x`.
pub fn constant_a(s: u32) -> Result<u64> {
    let p = special_prime(s)?;
    Ok(4 * (s as u64 - 2) * p * p)
}

/// What proof mode would need for a given `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Params {
    pub s_gon: u32,
    pub special_prime: u64,
    /// 1-based index of the special prime in the prime sequence.
    pub special_prime_index: usize,
    pub a: u64,
    /// Smallest `r >= special_prime_index` with `prod_{i<=r} (1 + 1/p_i) >= A`,
    /// when some prime below the cap reaches it.
    pub r_exact: Option<usize>,
    /// `ln p_r` estimated from `prod_{p<=x} (1 + 1/p) ~ e^gamma ln x / zeta(2)`.
    pub r_estimate_ln_pr: f64,
    /// `2 P_s(2 p_1 ... p_r)` when `r_exact` is known and it fits 128 bits.
    pub n_of_s: Option<u128>,
    pub prime_cap: u64,
    /// `prod (1 + 1/p)` over all primes up to the cap.
    pub product_at_cap: f64,
}

impl Theorem2Params {
    pub fn feasible(&self) -> bool {
        self.r_exact.is_some()
    }
}

/// Smallest 1-based `r >= r_min` with `prod_{i<=r} (1 + 1/primes[i-1]) >= target`.
fn smallest_r(primes: &[u64], r_min: usize, target: f64) -> (Option<usize>, f64) {
    let mut product = 1.0f64;
    let mut found = None;
    for (i, &p) in primes.iter().enumerate() {
        product *= 1.0 + 1.0 / p as f64;
        if found.is_none() && i + 1 >= r_min && product >= target {
            found = Some(i + 1);
        }
    }
    (found, product)
}

fn primorial_n_of_s(s: u32, primes: &[u64]) -> Option<u128> {
    let mut prod: u64 = 2;
    for &p in primes {
        prod = prod.checked_mul(p)?;
    }
    polygonal(s, prod).ok()?.checked_mul(2)
}

pub fn theorem2_params(s: u32, prime_cap: u64) -> Result<Theorem2Params> {
    let p = special_prime(s)?;
    let a = constant_a(s)?;
    if prime_cap == 0 {
        return Err(invalid("prime cap must be positive"));
    }
    let index = primes_up_to(p).len();
    let primes = primes_up_to(prime_cap);
    let (r_exact, product_at_cap) = smallest_r(&primes, index, a as f64);
    let n_of_s = r_exact.and_then(|r| primorial_n_of_s(s, &primes[..r]));
    Ok(Theorem2Params {
        s_gon: s,
        special_prime: p,
        special_prime_index: index,
        a,
        r_exact,
        r_estimate_ln_pr: a as f64 * ZETA_2 / EULER_GAMMA.exp(),
        n_of_s,
        prime_cap,
        product_at_cap,
    })
}

/// `n = practical_part + P_s(x) + P_s(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyDecomposition {
    pub n: u64,
    pub s_gon: u32,
    pub practical_part: u64,
    pub x: u64,
    pub y: u64,
}

impl PolyDecomposition {
    /// Exact sum plus an independent practicality check.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let px = polygonal(self.s_gon, self.x).map_err(|e| e.to_string())?;
        let py = polygonal(self.s_gon, self.y).map_err(|e| e.to_string())?;
        if self.practical_part as u128 + px + py != self.n as u128 {
            return Err("practical part + P_s(x) + P_s(y) != n".into());
        }
        let report = is_practical(self.practical_part).map_err(|e| e.to_string())?;
        if !report.practical {
            return Err(format!("{} is not practical", self.practical_part));
        }
        Ok(())
    }
}

/// How the practical part was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// `q = t * n_k / 2` with `n_k / 2` practical and `t <= sigma(n_k / 2) + 1`.
    QuotientBound,
    /// `q` checked against the characterization directly.
    Direct,
}

/// Search parameters that led to a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyProof {
    pub r: usize,
    pub k: u32,
    pub n_k: u64,
    pub residues: Vec<PairCongruence>,
    pub certification: Certification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem2Decomposition {
    pub decomposition: PolyDecomposition,
    pub proof: PolyProof,
}

/// Search-mode pipeline with the default combination budget.
pub fn theorem2_decompose(s: u32, n: u64, r: usize, max_k: u32) -> Result<Theorem2Decomposition> {
    theorem2_decompose_with(s, n, r, max_k, DEFAULT_MAX_COMBINATIONS)
}

struct Modulus {
    modulus: u64,
    solutions: Vec<(u64, u64)>,
}

/// Runs the construction with `n_k = 2 p_1 ... p_r` (the special prime raised
/// to `k`), for the largest `k <= max_k` with `2 P_s(n_k) < n`, then smaller
/// `k`. For each `k`, residue pairs modulo 4, each other odd prime and the
/// special prime power are combined by CRT in mixed-radix order (last
/// modulus fastest), at most `max_combinations` times.
pub fn theorem2_decompose_with(
    s: u32,
    n: u64,
    r: usize,
    max_k: u32,
    max_combinations: usize,
) -> Result<Theorem2Decomposition> {
    let special = special_prime(s)?;
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if max_k == 0 {
        return Err(invalid("max_k must be positive"));
    }
    let primes = first_primes(r);
    let special_idx = primes
        .iter()
        .position(|&p| p == special)
        .ok_or_else(|| invalid(format!("r = {r} does not reach the special prime {special}")))?;

    let mut viable = Vec::new();
    for k in 1..=max_k {
        let Some(n_k) = n_k_for(&primes, special_idx, k) else { break };
        match polygonal(s, n_k) {
            Ok(v) if v.checked_mul(2).is_some_and(|v| v < n as u128) => viable.push((k, n_k)),
            _ => break,
        }
    }

    for &(k, n_k) in viable.iter().rev() {
        if let Some(found) = search_k(s, n, r, &primes, special_idx, k, n_k, max_combinations)? {
            return Ok(found);
        }
    }
    Err(Error::NoDecompositionFound { n, s })
}

fn n_k_for(primes: &[u64], special_idx: usize, k: u32) -> Option<u64> {
    let mut v: u64 = 2;
    for (i, &p) in primes.iter().enumerate() {
        let f = if i == special_idx { p.checked_pow(k)? } else { p };
        v = v.checked_mul(f)?;
    }
    Some(v)
}

#[allow(clippy::too_many_arguments)]
fn search_k(
    s: u32,
    n: u64,
    r: usize,
    primes: &[u64],
    special_idx: usize,
    k: u32,
    n_k: u64,
    max_combinations: usize,
) -> Result<Option<Theorem2Decomposition>> {
    let mut moduli = Vec::with_capacity(primes.len());
    for (i, &p) in primes.iter().enumerate() {
        let (modulus, solutions) = if p == 2 {
            (4, all_pair_solutions(s, n, 4)?)
        } else if i == special_idx {
            (p.pow(k), pair_mod_pk_alternatives(s, n, p, k)?)
        } else {
            (p, all_pair_solutions(s, n, p)?)
        };
        if solutions.is_empty() {
            return Ok(None);
        }
        moduli.push(Modulus { modulus, solutions });
    }
    debug_assert_eq!(moduli.iter().map(|m| m.modulus).product::<u64>(), n_k);

    // CRT basis: x = sum x_i c_i (mod n_k).
    let big = n_k as u128;
    let basis: Vec<u128> = moduli
        .iter()
        .map(|m| {
            let rest = n_k / m.modulus;
            let inv = mod_inverse(rest as i128, m.modulus).expect("coprime moduli") as u128;
            rest as u128 * inv % big
        })
        .collect();

    let half = n_k / 2;
    let half_practical = is_practical_quick(half);
    let half_sigma_bound = sigma(&factorize(half)?)? + 1;

    let mut digits = vec![0usize; moduli.len()];
    for _ in 0..max_combinations {
        let mut x: u128 = 0;
        let mut y: u128 = 0;
        for ((m, &d), &c) in moduli.iter().zip(&digits).zip(&basis) {
            let (xr, yr) = m.solutions[d];
            x = (x + xr as u128 * c) % big;
            y = (y + yr as u128 * c) % big;
        }
        let (x, y) = (x as u64, y as u64);
        let gonal_sum = polygonal(s, x)? + polygonal(s, y)?;
        // x, y < n_k and 2 P_s(n_k) < n, so q > 0.
        let q = (n as u128 - gonal_sum) as u64;
        debug_assert_eq!(q % half, 0);
        let quotient = q / half;
        let certification = if half_practical && (quotient as u128) <= half_sigma_bound {
            Some(Certification::QuotientBound)
        } else if is_practical_quick(q) {
            Some(Certification::Direct)
        } else {
            None
        };
        if let Some(certification) = certification {
            let decomposition = PolyDecomposition { n, s_gon: s, practical_part: q, x, y };
            decomposition
                .verify()
                .map_err(|e| Error::InvalidArgument(format!("construction failed re-verification: {e}")))?;
            let residues = moduli
                .iter()
                .zip(&digits)
                .map(|(m, &d)| PairCongruence {
                    s_gon: s,
                    n_target: n,
                    x_res: m.solutions[d].0,
                    y_res: m.solutions[d].1,
                    modulus: m.modulus,
                })
                .collect();
            let proof = PolyProof { r, k, n_k, residues, certification };
            return Ok(Some(Theorem2Decomposition { decomposition, proof }));
        }
        if !advance(&mut digits, &moduli) {
            break;
        }
    }
    Ok(None)
}

fn advance(digits: &mut [usize], moduli: &[Modulus]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < moduli[i].solutions.len() {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// `2 P_s(n_k)` for the smallest admissible `n_k` (`k = 1`); inputs above it
/// are the ones the pipeline can attempt.
pub fn theorem2_threshold(s: u32, r: usize) -> Result<u128> {
    let special = special_prime(s)?;
    let primes = first_primes(r);
    let idx = primes
        .iter()
        .position(|&p| p == special)
        .ok_or_else(|| invalid(format!("r = {r} does not reach the special prime {special}")))?;
    let n_k = n_k_for(&primes, idx, 1).ok_or(Error::Overflow("n_k"))?;
    polygonal(s, n_k)?.checked_mul(2).ok_or(Error::Overflow("2 P_s(n_k)"))
}
