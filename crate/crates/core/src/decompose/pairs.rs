//! Solutions of `P_s(x) + P_s(y) = n` modulo 4 (parity classes), modulo odd
//! primes and modulo prime powers.

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, lift_second_square, mod_inverse, two_squares_base_all, two_squares_mod_pk};
use crate::error::{invalid, Error, Result};

/// Residues `(x_res, y_res)` with `P_s(x_res) + P_s(y_res) = n_target (mod modulus)`.
///
/// For the modulus-4 case the guarantee is weaker: every `x = x_res`,
/// `y = y_res (mod 4)` gives the right parity of `n_target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCongruence {
    pub s_gon: u32,
    pub n_target: u64,
    pub x_res: u64,
    pub y_res: u64,
    pub modulus: u64,
}

impl PairCongruence {
    /// Checks the congruence by direct evaluation. Modulus 4 is checked as
    /// the parity class statement.
    pub fn holds(&self) -> bool {
        if self.modulus == 4 {
            return class_parity_holds(self.s_gon, self.n_target, self.x_res, self.y_res);
        }
        let m = self.modulus;
        (gonal_mod(self.s_gon, self.x_res, m) + gonal_mod(self.s_gon, self.y_res, m)) % m
            == self.n_target % m
    }
}

/// `P_s(x) mod m`, valid for any `x` and `m >= 1`.
pub fn gonal_mod(s: u32, x: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let x = x as u128;
    let (a, b) = if x % 2 == 0 { (x / 2, x.saturating_sub(1)) } else { (x, (x - 1) / 2) };
    let pairs = (a % m128) * (b % m128) % m128;
    let sm2 = (s as u128 - 2) % m128;
    ((sm2 * pairs + x) % m128) as u64
}

fn class_parity_holds(s: u32, n: u64, x: u64, y: u64) -> bool {
    // Parity of P_s depends only on the index modulo 4.
    (0..4u64).all(|i| {
        (0..4u64).all(|j| (gonal_mod(s, x % 4 + 4 * i, 2) + gonal_mod(s, y % 4 + 4 * j, 2)) % 2 == n % 2)
    })
}

fn check_s(s: u32) -> Result<()> {
    if s < 4 {
        return Err(invalid(format!("gonality must be at least 4, got {s}")));
    }
    Ok(())
}

/// A solution modulo an odd prime `p`.
///
/// When `p | (s - 2)`, `P_s(y) = y (mod p)`, so `(n mod p, 0)` works.
/// Otherwise the lexicographically smallest pair in `[0, p)^2` is returned.
pub fn pair_mod_p(s: u32, n: u64, p: u64) -> Result<PairCongruence> {
    check_s(s)?;
    if p == 2 || !is_prime(p) {
        return Err(invalid(format!("{p} is not an odd prime")));
    }
    let np = n % p;
    let (x_res, y_res) = if (s as u64 - 2) % p == 0 {
        (np, 0)
    } else {
        let mut first = vec![u64::MAX; p as usize];
        for y in (0..p).rev() {
            first[gonal_mod(s, y, p) as usize] = y;
        }
        (0..p)
            .find_map(|x| {
                let need = (np + p - gonal_mod(s, x, p)) % p;
                let y = first[need as usize];
                (y != u64::MAX).then_some((x, y))
            })
            .expect("value sets of size (p+1)/2 intersect")
    };
    Ok(PairCongruence { s_gon: s, n_target: n, x_res, y_res, modulus: p })
}

/// Residues modulo 4 fixing the parity: `(0, 0)` for even `n`, `(0, 1)` for odd.
pub fn pair_mod_2(s: u32, n: u64) -> Result<PairCongruence> {
    check_s(s)?;
    Ok(PairCongruence { s_gon: s, n_target: n, x_res: 0, y_res: n % 2, modulus: 4 })
}

/// Smallest prime `p = 1 (mod 4)` not dividing `s - 2`.
pub fn special_prime(s: u32) -> Result<u64> {
    check_s(s)?;
    let sm2 = s as u64 - 2;
    Ok((5u64..)
        .step_by(4)
        .find(|&p| is_prime(p) && sm2 % p != 0)
        .expect("infinitely many primes 1 mod 4"))
}

fn check_pk_prime(s: u32, p: u64) -> Result<()> {
    check_s(s)?;
    if p % 4 != 1 || !is_prime(p) {
        return Err(invalid(format!("{p} is not a prime congruent to 1 mod 4")));
    }
    if (s as u64 - 2) % p == 0 {
        return Err(invalid(format!("{p} divides s - 2 = {}", s - 2)));
    }
    Ok(())
}

struct PkSetup {
    pk: u64,
    target: u64,
    inv: u128,
}

fn pk_setup(s: u32, n: u64, p: u64, k: u32) -> Result<PkSetup> {
    check_pk_prime(s, p)?;
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    let pk = p.checked_pow(k).ok_or(Error::Overflow("p^k"))?;
    let m = pk as u128;
    let sm2 = s as u128 - 2;
    let sm4 = s as u128 - 4;
    // x0^2 + y0^2 = 8(s-2)n + 2(s-4)^2 (mod p^k)
    let target = ((8 * sm2 % m) * (n as u128 % m) + 2 * (sm4 * sm4 % m)) % m;
    let inv = mod_inverse((2 * sm2) as i128, pk)? as u128;
    Ok(PkSetup { pk, target: target as u64, inv })
}

fn untransform(setup: &PkSetup, s: u32, root: u64) -> u64 {
    let m = setup.pk as u128;
    ((root as u128 + (s as u128 - 4)) % m * setup.inv % m) as u64
}

/// A solution modulo `p^k` for `p = 1 (mod 4)`, `p ∤ (s - 2)`.
///
/// Uses `8(s-2) P_s(x) = (2(s-2)x - (s-4))^2 - (s-4)^2`: a sum of two squares
/// `x0^2 + y0^2 = 8(s-2)n + 2(s-4)^2` maps back through
/// `x = (2(s-2))^{-1} (x0 + s - 4)`.
pub fn pair_mod_pk(s: u32, n: u64, p: u64, k: u32) -> Result<PairCongruence> {
    let setup = pk_setup(s, n, p, k)?;
    let (x0, y0) = two_squares_mod_pk(setup.target, p, k)?;
    let pc = PairCongruence {
        s_gon: s,
        n_target: n,
        x_res: untransform(&setup, s, x0),
        y_res: untransform(&setup, s, y0),
        modulus: setup.pk,
    };
    if !pc.holds() {
        return Err(Error::InvalidArgument(format!("lifted pair failed verification: {pc:?}")));
    }
    Ok(pc)
}

/// Every pair in `[0, modulus)^2` solving the congruence (the parity-class
/// statement when `modulus` is 4), lexicographically ordered.
pub fn all_pair_solutions(s: u32, n: u64, modulus: u64) -> Result<Vec<(u64, u64)>> {
    check_s(s)?;
    if modulus == 0 {
        return Err(invalid("modulus must be positive"));
    }
    let mut out = Vec::new();
    for x in 0..modulus {
        for y in 0..modulus {
            let pc = PairCongruence { s_gon: s, n_target: n, x_res: x, y_res: y, modulus };
            if pc.holds() {
                out.push((x, y));
            }
        }
    }
    Ok(out)
}

/// Distinct solutions modulo `p^k` reachable by lifting every base
/// two-squares solution modulo `p`, lexicographically ordered.
pub fn pair_mod_pk_alternatives(s: u32, n: u64, p: u64, k: u32) -> Result<Vec<(u64, u64)>> {
    let setup = pk_setup(s, n, p, k)?;
    let mut out = Vec::new();
    for (bx, by) in two_squares_base_all(setup.target, p)? {
        let (x0, y0) = lift_second_square(setup.target, p, k, bx, by)?;
        let cand = (untransform(&setup, s, x0), untransform(&setup, s, y0));
        let pc = PairCongruence { s_gon: s, n_target: n, x_res: cand.0, y_res: cand.1, modulus: setup.pk };
        if pc.holds() {
            out.push(cand);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
