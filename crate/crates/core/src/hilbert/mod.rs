//! Orbifold contributions `Q_σ`, δ-vectors, degree contributions `A_σ`, and
//! Hilbert series of orbifold del Pezzo surfaces.

mod dedekind;
mod series;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use dedekind::{dedekind_sum, DedekindTable};
pub use series::{assemble_series, initial_term, split_series, HilbertSeries};

use crate::error::{Error, Result};
use crate::exactalg::{int, IntPolynomial, Rational, RationalFunction};
use crate::singularity::{Basket, Singularity};

/// Abbreviated δ-vector `(δ_1, …, δ_{ℓ−2})` at local index `ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeltaVector {
    ell: u64,
    entries: Vec<i64>,
}

impl DeltaVector {
    pub fn new(ell: u64, entries: Vec<i64>) -> Result<Self> {
        let want = ell.saturating_sub(2) as usize;
        if entries.len() != want {
            return Err(Error::LengthMismatch(entries.len(), want));
        }
        Ok(DeltaVector { ell, entries })
    }

    pub fn zero(ell: u64) -> Self {
        DeltaVector { ell, entries: vec![0; ell.saturating_sub(2) as usize] }
    }

    pub fn local_index(&self) -> u64 {
        self.ell
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// `(0, δ_1, …, δ_{ℓ−2}, 0)`.
    pub fn full(&self) -> Vec<i64> {
        if self.ell < 2 {
            return vec![0; self.ell as usize];
        }
        let mut v = Vec::with_capacity(self.ell as usize);
        v.push(0);
        v.extend(&self.entries);
        v.push(0);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn is_palindromic(&self) -> bool {
        self.entries.iter().eq(self.entries.iter().rev())
    }

    pub fn scale(&self, k: i64) -> Self {
        DeltaVector { ell: self.ell, entries: self.entries.iter().map(|x| x * k).collect() }
    }

    /// `δ_1 t + … + δ_{ℓ−2} t^{ℓ−2}`.
    pub fn numerator(&self) -> IntPolynomial {
        IntPolynomial::from_i64(&self.full())
    }

    /// `Q = numerator / (ℓ(1 − t^ℓ))`.
    pub fn q_series(&self) -> RationalFunction {
        let den = IntPolynomial::one_minus_t_pow(self.ell as usize).scale(&(self.ell as i64).into());
        RationalFunction::new(self.numerator(), den)
    }

    /// Text form used by the CLI: `(t - 2*t^2 + t^3)/(5*(1 - t^5))`.
    pub fn q_string(&self) -> String {
        format!("({})/({}*(1 - t^{}))", self.numerator(), self.ell, self.ell)
    }

    pub fn format(&self, full: bool) -> String {
        let v = if full { self.full() } else { self.entries.clone() };
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("({})", s.join(","))
    }
}

impl fmt::Display for DeltaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(false))
    }
}

impl Add for &DeltaVector {
    type Output = DeltaVector;
    fn add(self, o: &DeltaVector) -> DeltaVector {
        assert_eq!(self.ell, o.ell, "local index mismatch");
        DeltaVector {
            ell: self.ell,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &DeltaVector {
    type Output = DeltaVector;
    fn sub(self, o: &DeltaVector) -> DeltaVector {
        self + &(-o)
    }
}

impl Neg for &DeltaVector {
    type Output = DeltaVector;
    fn neg(self) -> DeltaVector {
        self.scale(-1)
    }
}

/// δ-vector of `Q_σ`.
///
/// The numerator over `1 − t^r` has coefficients `δ_{r,a,(a+1)(j+1)} − δ_{r,a,0}`;
/// it is divided exactly by `(1 − t^r)/(1 − t^ℓ)` and scaled by `ℓ`.
pub fn orbifold_contribution(s: &Singularity) -> DeltaVector {
    let (l, _, _) = s.invariants();
    if s.r() == 1 || l <= 2 {
        return DeltaVector::zero(l);
    }
    let table = DedekindTable::new(s.r(), s.a()).expect("valid singularity");
    let r = s.r() as usize;
    let l = l as usize;
    let a1 = s.a() as i64 + 1;
    let base = table.scaled(0);
    // r³ times the numerator coefficients
    let num: Vec<i128> = (0..r).map(|j| table.scaled(a1 * (j as i64 + 1)) - base).collect();
    // num·(1 − t^ℓ) must equal q·(1 − t^r) with deg q < ℓ
    let mut prod = vec![0i128; r + l];
    for (j, &c) in num.iter().enumerate() {
        prod[j] += c;
        prod[j + l] -= c;
    }
    assert!(
        prod[l..r].iter().all(|&c| c == 0),
        "numerator of {s} is not divisible by (1-t^r)/(1-t^l)"
    );
    let r3 = (r as i128).pow(3);
    let full: Vec<i64> = prod[..l]
        .iter()
        .map(|&c| {
            let v = c * l as i128;
            assert_eq!(v % r3, 0, "non-integral delta for {s}");
            (v / r3) as i64
        })
        .collect();
    assert!(full[0] == 0 && full[l - 1] == 0, "delta ends must vanish for {s}");
    DeltaVector { ell: l as u64, entries: full[1..l - 1].to_vec() }
}

/// Hirzebruch–Jung continued fraction `p/q = b_1 − 1/(b_2 − …)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HJExpansion {
    pub p: i64,
    pub q: i64,
    pub terms: Vec<i64>,
}

impl HJExpansion {
    pub fn evaluate(&self) -> Option<Rational> {
        let mut it = self.terms.iter().rev();
        let mut acc = Rational::from_integer((*it.next()?).into());
        for &b in it {
            acc = int(b) - acc.recip();
        }
        Some(acc)
    }
}

pub fn hj_expansion(p: i64, q: i64) -> Result<HJExpansion> {
    if q <= 0 || p < q {
        return Err(Error::InvalidFraction(p, q));
    }
    let mut terms = Vec::new();
    let (mut x, mut y) = (p, q);
    if x != y {
        while y != 0 {
            let b = (x + y - 1) / y;
            terms.push(b);
            (x, y) = (y, b * y - x);
        }
    }
    Ok(HJExpansion { p, q, terms })
}

/// Solves `d_{i−1} − b_i d_i + d_{i+1} = b_i − 2` with `d_0 = d_{m+1} = 0`.
pub fn discrepancies(hj: &HJExpansion) -> Vec<Rational> {
    let m = hj.terms.len();
    if m == 0 {
        return Vec::new();
    }
    // Thomas algorithm on the tridiagonal system
    let mut diag: Vec<Rational> = hj.terms.iter().map(|&b| int(-b)).collect();
    let mut rhs: Vec<Rational> = hj.terms.iter().map(|&b| int(b - 2)).collect();
    for i in 1..m {
        let w = diag[i - 1].recip();
        diag[i] = &diag[i] - &w;
        rhs[i] = &rhs[i] - &(&rhs[i - 1] * &w);
    }
    let mut d = vec![Rational::zero(); m];
    d[m - 1] = &rhs[m - 1] / &diag[m - 1];
    for i in (0..m - 1).rev() {
        d[i] = (&rhs[i] - &d[i + 1]) / &diag[i];
    }
    d
}

/// Which continued fraction feeds the degree formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HjConvention {
    /// `r/a`, the minimal resolution of `1/r(1,a)`.
    RoverA,
    /// `r/(a+1)`, as printed next to the degree formula.
    RoverAplus1,
}

/// Selected by the anchored values `A(1/9(1,2)) = 1`, `A(1/20(1,3)) = −8/5`
/// and `A_σ + A_{σ⁻¹} = 1`; only `r/a` passes all of them.
pub const HJ_CONVENTION: HjConvention = HjConvention::RoverA;

/// `A_σ = m + 1 − Σ d_i² b_i + 2 Σ d_i d_{i+1}`.
pub fn degree_contribution(s: &Singularity) -> Rational {
    degree_contribution_with(s, HJ_CONVENTION)
}

pub fn degree_contribution_with(s: &Singularity, conv: HjConvention) -> Rational {
    if s.is_smooth() {
        return Rational::zero();
    }
    let (r, a) = (s.r() as i64, s.a() as i64);
    if a == r - 1 {
        let (l, k, _) = s.invariants();
        return Rational::new((k as i64).into(), (l as i64).into());
    }
    let hj = match conv {
        HjConvention::RoverA => hj_expansion(r, a),
        HjConvention::RoverAplus1 => hj_expansion(r, a + 1),
    }
    .expect("valid fraction");
    let d = discrepancies(&hj);
    let m = hj.terms.len() as i64;
    let mut acc = int(m + 1);
    for (di, &b) in d.iter().zip(&hj.terms) {
        acc -= di * di * int(b);
    }
    for w in d.windows(2) {
        acc += int(2) * &w[0] * &w[1];
    }
    acc
}

/// Per-ℓ δ-vector sums and `ΣA` of a basket.
pub fn basket_contributions(b: &Basket) -> (BTreeMap<u64, DeltaVector>, Rational) {
    let mut parts: BTreeMap<u64, DeltaVector> = BTreeMap::new();
    let mut total = Rational::zero();
    for s in b.elements() {
        let q = orbifold_contribution(s);
        let e = parts.entry(q.local_index()).or_insert_with(|| DeltaVector::zero(q.local_index()));
        *e = &*e + &q;
        total += degree_contribution(s);
    }
    (parts, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn s(r: u64, a: u64) -> Singularity {
        Singularity::new(r, a).unwrap()
    }

    fn dv(l: u64, e: &[i64]) -> DeltaVector {
        DeltaVector::new(l, e.to_vec()).unwrap()
    }

    #[test]
    fn index_five_delta_vectors() {
        assert_eq!(orbifold_contribution(&s(5, 1)), dv(5, &[1, -2, 1]));
        assert_eq!(orbifold_contribution(&s(20, 3)), dv(5, &[2, 1, 2]));
        assert_eq!(orbifold_contribution(&s(10, 1)), dv(5, &[3, 4, 3]));
        assert_eq!(orbifold_contribution(&s(15, 2)), dv(5, &[1, 3, 1]));
        assert!(orbifold_contribution(&s(9, 2)).is_zero());
    }

    #[test]
    fn q_string_matches_cli_form() {
        assert_eq!(orbifold_contribution(&s(5, 1)).q_string(), "(t - 2*t^2 + t^3)/(5*(1 - t^5))");
    }

    #[test]
    fn hj_examples() {
        assert_eq!(hj_expansion(5, 2).unwrap().terms, vec![3, 2]);
        assert_eq!(hj_expansion(7, 1).unwrap().terms, vec![7]);
        assert!(hj_expansion(1, 1).unwrap().terms.is_empty());
        assert_eq!(hj_expansion(1, 2), Err(Error::InvalidFraction(1, 2)));
        assert_eq!(hj_expansion(3, 0), Err(Error::InvalidFraction(3, 0)));
        let e = hj_expansion(37, 11).unwrap();
        assert!(e.terms.iter().all(|&b| b >= 2));
        assert_eq!(e.evaluate(), Some(rat(37, 11)));
    }

    #[test]
    fn discrepancy_examples() {
        let d = |t: &[i64]| discrepancies(&HJExpansion { p: 0, q: 0, terms: t.to_vec() });
        assert_eq!(d(&[2]), vec![rat(0, 1)]);
        assert_eq!(d(&[3]), vec![rat(-1, 3)]);
        assert_eq!(d(&[2, 2, 2]), vec![rat(0, 1); 3]);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree_contribution(&s(9, 2)), rat(1, 1));
        assert_eq!(degree_contribution(&s(4, 1)), rat(1, 1));
        assert_eq!(degree_contribution(&s(20, 3)), rat(-8, 5));
        assert_eq!(degree_contribution(&s(5, 1)) + degree_contribution(&s(20, 11)), rat(1, 1));
        assert_eq!(degree_contribution(&Singularity::SMOOTH), rat(0, 1));
        assert_eq!(degree_contribution(&s(7, 6)), rat(7, 1));
    }

    #[test]
    fn other_convention_fails_anchors() {
        let c = HjConvention::RoverAplus1;
        let ok = degree_contribution_with(&s(9, 2), c) == rat(1, 1)
            && degree_contribution_with(&s(20, 3), c) == rat(-8, 5)
            && degree_contribution_with(&s(5, 1), c) + degree_contribution_with(&s(20, 11), c)
                == rat(1, 1);
        assert!(!ok);
    }

    #[test]
    fn basket_sums() {
        let b: Basket = "1/5(1,1), 1/15(1,2)".parse().unwrap();
        let (parts, _) = basket_contributions(&b);
        assert_eq!(parts[&5], dv(5, &[2, 1, 2]));
        let (parts, a) = basket_contributions(&Basket::empty());
        assert!(parts.is_empty());
        assert_eq!(a, rat(0, 1));
        let b: Basket = "1/6(1,1), 1/3(1,1)".parse().unwrap();
        let (parts, a) = basket_contributions(&b);
        assert!(parts[&3].is_zero());
        assert_eq!(a, rat(1, 1));
    }
}
