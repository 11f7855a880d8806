use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactalg::Rational;

/// Values `δ_{r,a,i}` for fixed `(r, a)`.
///
/// With `h = (x^r − 1)/(x − 1)` the inverse of `1 − x` modulo `h` is
/// `−(1/r)·Σ m x^m`, and substituting `x ↦ x^a` inverts `1 − x^a`. Their product
/// `u` represents `1/((1−x)(1−x^a))` at every nontrivial `r`-th root, and the
/// power sums `Σ_{ξ≠1} ξ^m ∈ {r − 1, −1}` turn `(1/r)Σ ξ^i u(ξ)` into
/// `(r·u_{−i} − Σ u_m)/r`. We store `r²·u` as integers.
#[derive(Clone, Debug)]
pub struct DedekindTable {
    r: u64,
    scaled_u: Vec<i128>,
}

impl DedekindTable {
    pub fn new(r: u64, a: u64) -> Result<Self> {
        if r < 2 || r.gcd(&a) != 1 {
            return Err(Error::InvalidWeight { r, a: a as i64 });
        }
        let ri = r as i128;
        let a_inv = crate::singularity::mod_inverse(a % r, r) as i128;
        // r²·u_e = Σ_m m·n  with  a·n ≡ e − m (mod r)
        let scaled_u = (0..ri)
            .map(|e| (0..ri).map(|m| m * ((e - m) * a_inv).rem_euclid(ri)).sum())
            .collect();
        Ok(DedekindTable { r, scaled_u })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// `r³·δ_{r,a,i}`, an integer.
    pub fn scaled(&self, i: i64) -> i128 {
        let r = self.r as i128;
        let t = r * (r - 1) / 2;
        let e = (-(i as i128)).rem_euclid(r) as usize;
        r * self.scaled_u[e] - t * t
    }

    pub fn value(&self, i: i64) -> Rational {
        let r3 = BigInt::from(self.r).pow(3);
        Rational::new(BigInt::from(self.scaled(i)), r3)
    }
}

/// `δ_{r,a,i} = (1/r)·Σ_{ξ^r=1, ξ≠1} ξ^i / ((1−ξ)(1−ξ^a))`.
pub fn dedekind_sum(r: u64, a: i64, i: i64) -> Result<Rational> {
    let ar = a.rem_euclid(r.max(1) as i64) as u64;
    if r < 2 || r.gcd(&ar) != 1 {
        return Err(Error::InvalidWeight { r, a });
    }
    Ok(DedekindTable::new(r, ar)?.value(i))
}
