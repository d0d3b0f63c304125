use super::factor::is_prime;
use super::modular::mod_inverse;
use crate::error::{Error, Result};

/// Odd square root of `8n + 1` modulo `2^(m + 2)`, where
/// `m = floor(log2(sqrt(8n + 1)))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoAdicRoot {
    pub x: u64,
    pub m: u32,
}

/// `floor(log2(sqrt(v)))` for `v >= 1`, via the exact integer square root.
pub fn log2_sqrt_floor(v: u128) -> u32 {
    let r = v.isqrt();
    127 - r.leading_zeros()
}

/// Returns the unique odd `x` in `[1, 2^m - 1]` with
/// `x^2 = 8n + 1 (mod 2^(m + 2))`.
///
/// The root is built one bit at a time starting from `x = 1 (mod 8)`, then
/// folded: modulo `2^(m + 2)` the roots are `{x, 2^(m+1) - x}` plus their
/// shifts by `2^(m+1)`, and exactly one of the first pair lies below `2^m`.
pub fn two_adic_sqrt_8n1(n: u64) -> Result<TwoAdicRoot> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let target = 8 * n as u128 + 1;
    let m = log2_sqrt_floor(target);
    let mut x: u128 = 1;
    for j in 3..m + 2 {
        let mask = (1u128 << (j + 1)) - 1;
        if (x * x) & mask != target & mask {
            x += 1 << (j - 1);
        }
    }
    let half = 1u128 << m;
    if x > half {
        x = (half << 1) - x;
    }
    debug_assert!(x & 1 == 1 && x < half);
    debug_assert_eq!((x * x) % (half << 2), target % (half << 2));
    Ok(TwoAdicRoot { x: x as u64, m })
}

/// Finds `(x, y)` with `x^2 + y^2 = n (mod p^k)` and `p` not dividing `y`,
/// for a prime `p = 1 (mod 4)`.
///
/// The base solution modulo `p` is the lexicographically smallest one with
/// `p ∤ y` (or `(a, 1)` with `a^2 = -1` when `p | n`), and `y` is then lifted a
/// digit at a time with `x` held fixed.
pub fn two_squares_mod_pk(n: u64, p: u64, k: u32) -> Result<(u64, u64)> {
    let (x, y) = two_squares_base(n, p)?;
    lift_second_square(n, p, k, x, y)
}

fn check_one_mod_four_prime(p: u64) -> Result<()> {
    if p % 4 != 1 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!(
            "{p} is not a prime congruent to 1 mod 4"
        )));
    }
    Ok(())
}

fn two_squares_base(n: u64, p: u64) -> Result<(u64, u64)> {
    check_one_mod_four_prime(p)?;
    let np = n % p;
    let sq = |v: u64| ((v as u128 * v as u128) % p as u128) as u64;
    if np == 0 {
        let a = (1..p)
            .find(|&a| (sq(a) + 1) % p == 0)
            .expect("-1 is a square modulo a prime 1 mod 4");
        return Ok((a, 1));
    }
    let mut root = vec![u64::MAX; p as usize];
    for y in (0..p).rev() {
        root[sq(y) as usize] = y;
    }
    for x in 0..p {
        let r = (np + p - sq(x)) % p;
        if r != 0 && root[r as usize] != u64::MAX {
            return Ok((x, root[r as usize]));
        }
    }
    unreachable!("every residue is a sum of two squares modulo p")
}

/// All base solutions `(x, y)` in `[0, p)^2` of `x^2 + y^2 = n (mod p)` with
/// `p ∤ y`, in lexicographic order.
pub fn two_squares_base_all(n: u64, p: u64) -> Result<Vec<(u64, u64)>> {
    check_one_mod_four_prime(p)?;
    let np = n % p;
    let sq = |v: u64| ((v as u128 * v as u128) % p as u128) as u64;
    let mut roots: Vec<Vec<u64>> = vec![Vec::new(); p as usize];
    for y in 1..p {
        roots[sq(y) as usize].push(y);
    }
    let mut out = Vec::new();
    for x in 0..p {
        let r = (np + p - sq(x)) % p;
        for &y in &roots[r as usize] {
            out.push((x, y));
        }
    }
    Ok(out)
}

/// Lifts a solution modulo `p` with `p ∤ y` to modulo `p^k`, keeping `x`.
pub fn lift_second_square(n: u64, p: u64, k: u32, x: u64, y: u64) -> Result<(u64, u64)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if y % p == 0 {
        return Err(Error::InvalidArgument("p must not divide y".into()));
    }
    let pk = p.checked_pow(k).ok_or(Error::Overflow("p^k"))?;
    let (x, mut y) = (x % p, y % p);
    let mut ps: u128 = p as u128;
    for _ in 1..k {
        let next = ps * p as u128;
        let sq = |v: u128| (v % next) * (v % next) % next;
        let residual = (n as u128 % next + 2 * next - sq(x as u128) - sq(y as u128)) % next;
        debug_assert_eq!(residual % ps, 0);
        let quotient = residual / ps;
        let inv = mod_inverse(2 * y as i128, p)? as u128;
        let l = quotient * inv % p as u128;
        y = (y as u128 + ps * l) as u64;
        ps = next;
    }
    debug_assert!(y < pk);
    Ok((x, y))
}
