use serde::{Deserialize, Serialize};

use crate::arith::two_adic_sqrt_8n1;
use crate::error::{invalid, Result};
use crate::polygonal::triangular_from_odd;
use crate::practical::is_practical_quick;

/// `n = 2^(m-1) * s + T(tri_index)` where `8n + 1 - x^2 = 2^(m+2) * s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriDecomposition {
    pub n: u64,
    pub x: u64,
    pub m: u32,
    /// Cofactor with `8n + 1 - x^2 = 2^(m+2) * s`; at most `2^m`.
    pub s: u64,
    pub practical_part: u64,
    pub tri_index: u64,
}

/// Writes `n` as a practical number plus a triangular number.
///
/// `x` is the odd root of `8n + 1` modulo `2^(m+2)` below `2^m`, so
/// `x^2 < 2^(2m) <= 8n + 1` and the difference is `2^(m+2) * s` with
/// `1 <= s <= 2^m = sigma(2^(m-1)) + 1`. Hence `2^(m-1) * s` is practical, and
/// `(x^2 - 1) / 8` is triangular with index `(x - 1) / 2`.
pub fn decompose_practical_triangular(n: u64) -> Result<TriDecomposition> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let root = two_adic_sqrt_8n1(n)?;
    let (x, m) = (root.x as u128, root.m);
    let diff = 8 * n as u128 + 1 - x * x;
    let s = diff >> (m + 2);
    debug_assert_eq!(s << (m + 2), diff);
    let practical_part = (s << (m - 1)) as u64;
    let (_, tri_index) = triangular_from_odd(root.x)?;
    Ok(TriDecomposition { n, x: root.x, m, s: s as u64, practical_part, tri_index })
}

impl TriDecomposition {
    /// Rechecks every invariant from the stored fields alone.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let n = self.n as u128;
        let x = self.x as u128;
        if self.m == 0 || self.m > 40 {
            return Err(format!("m = {} out of range", self.m));
        }
        if x % 2 == 0 || x >= 1u128 << self.m {
            return Err(format!("x = {} is not odd and below 2^m", self.x));
        }
        if x * x > 8 * n + 1 || 8 * n + 1 - x * x != (self.s as u128) << (self.m + 2) {
            return Err("8n + 1 - x^2 != 2^(m+2) s".into());
        }
        if self.s == 0 || self.s as u128 > 1u128 << self.m {
            return Err(format!("cofactor {} outside [1, 2^m]", self.s));
        }
        if self.practical_part as u128 != (self.s as u128) << (self.m - 1) {
            return Err("practical part != 2^(m-1) s".into());
        }
        if !is_practical_quick(self.practical_part) {
            return Err(format!("{} is not practical", self.practical_part));
        }
        let t = self.tri_index as u128;
        if self.practical_part as u128 + t * (t + 1) / 2 != n {
            return Err("practical part + triangular != n".into());
        }
        Ok(())
    }
}
