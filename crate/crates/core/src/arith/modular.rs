use crate::error::{Error, Result};

/// `residue (mod modulus)` with `residue < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Congruence {
    residue: u64,
    modulus: u64,
}

impl Congruence {
    pub fn new(residue: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        if residue >= modulus {
            return Err(Error::InvalidArgument(format!(
                "residue {residue} not reduced modulo {modulus}"
            )));
        }
        Ok(Congruence { residue, modulus })
    }

    /// Reduces an arbitrary integer into the canonical residue.
    pub fn reduce(value: i128, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        let residue = value.rem_euclid(modulus as i128) as u64;
        Ok(Congruence { residue, modulus })
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn contains(&self, value: u128) -> bool {
        value % self.modulus as u128 == self.residue as u128
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// The inverse of `a` modulo `m`, as the least non-negative residue.
pub fn mod_inverse(a: i128, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if m == 1 {
        return Ok(0);
    }
    let a_red = a.rem_euclid(m as i128);
    let (g, s, _) = ext_gcd(a_red, m as i128);
    if g != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(s.rem_euclid(m as i128) as u64)
}

/// Combines congruences with pairwise coprime moduli into one congruence
/// modulo their product.
pub fn crt_combine(cs: &[Congruence]) -> Result<Congruence> {
    let mut acc = Congruence { residue: 0, modulus: 1 };
    for c in cs {
        if gcd(acc.modulus, c.modulus) != 1 {
            let conflicting = cs
                .iter()
                .find(|o| gcd(o.modulus, c.modulus) != 1)
                .map_or(acc.modulus, |o| o.modulus);
            return Err(Error::NonCoprimeModuli { a: conflicting, b: c.modulus });
        }
        let m1 = acc.modulus as u128;
        let m2 = c.modulus as u128;
        let modulus = acc
            .modulus
            .checked_mul(c.modulus)
            .ok_or(Error::Overflow("crt modulus"))?;
        // x = r1 + m1 * t,  t = (r2 - r1) * m1^{-1} (mod m2)
        let inv = mod_inverse(acc.modulus as i128, c.modulus)? as u128;
        let diff = (c.residue as u128 + m2 - (acc.residue as u128 % m2)) % m2;
        let t = diff * inv % m2;
        let residue = (acc.residue as u128 + m1 * t) % modulus as u128;
        acc = Congruence { residue: residue as u64, modulus };
    }
    Ok(acc)
}
