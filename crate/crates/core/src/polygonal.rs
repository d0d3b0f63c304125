//! s-gonal numbers `P_s(k) = (s - 2) k (k - 1) / 2 + k`, index 0 included.

use crate::error::{invalid, Error, Result};

/// A value of the s-gonal sequence together with its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GonalValue {
    pub s: u32,
    pub index: u64,
    pub value: u128,
}

impl GonalValue {
    pub fn new(s: u32, index: u64) -> Result<Self> {
        Ok(GonalValue { s, index, value: polygonal(s, index)? })
    }
}

fn check_s(s: u32) -> Result<()> {
    if s < 3 {
        return Err(invalid(format!("gonality must be at least 3, got {s}")));
    }
    Ok(())
}

/// `P_s(k)`, exact; overflow of 128 bits is reported.
pub fn polygonal(s: u32, k: u64) -> Result<u128> {
    check_s(s)?;
    let k = k as u128;
    let pairs = if k == 0 { 0 } else { k * (k - 1) / 2 };
    (s as u128 - 2)
        .checked_mul(pairs)
        .and_then(|v| v.checked_add(k))
        .ok_or(Error::Overflow("polygonal"))
}

/// `P_s(k)` when it fits in 64 bits.
pub fn polygonal_u64(s: u32, k: u64) -> Result<u64> {
    u64::try_from(polygonal(s, k)?).map_err(|_| Error::Overflow("polygonal"))
}

/// The index `k` with `P_s(k) = v`, if `v` is s-gonal.
///
/// Solves `(s-2)k^2 - (s-4)k - 2v = 0` with an integer square root and checks
/// the candidate exactly.
pub fn gonal_index(s: u32, v: u64) -> Option<u64> {
    if s < 3 {
        return None;
    }
    if v == 0 {
        // the other root, (s-4)/(s-2), is not a valid index
        return Some(0);
    }
    let a = s as i128 - 2;
    let b = s as i128 - 4;
    let disc = (b * b) as u128 + 8 * a as u128 * v as u128;
    let root = disc.isqrt() as i128;
    if (root * root) as u128 != disc {
        return None;
    }
    let num = b + root;
    if num < 0 || num % (2 * a) != 0 {
        return None;
    }
    let k = u64::try_from(num / (2 * a)).ok()?;
    (polygonal(s, k).ok()? == v as u128).then_some(k)
}

/// All `P_s(k) <= bound`, ascending from `P_s(0) = 0`.
pub fn gonal_values_upto(s: u32, bound: u64) -> Result<Vec<u64>> {
    check_s(s)?;
    let mut out = Vec::new();
    for k in 0u64.. {
        let v = polygonal(s, k)?;
        if v > bound as u128 {
            break;
        }
        out.push(v as u64);
    }
    Ok(out)
}

/// For odd `x`, the triangular number `(x^2 - 1) / 8` and its index
/// `(x - 1) / 2`.
pub fn triangular_from_odd(x: u64) -> Result<(u128, u64)> {
    if x % 2 == 0 {
        return Err(invalid(format!("{x} is even")));
    }
    let x = x as u128;
    Ok(((x * x - 1) / 8, ((x - 1) / 2) as u64))
}
