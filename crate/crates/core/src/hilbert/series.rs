use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{basket_contributions, DeltaVector};
use crate::error::{Error, Result};
use crate::exactalg::{IntPolynomial, Rational, RationalFunction};
use crate::singularity::Basket;

/// A Hilbert series together with its decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSeries {
    pub series: RationalFunction,
    pub k2: Rational,
    /// Nonzero per-ℓ δ-vector sums.
    pub parts: BTreeMap<u64, DeltaVector>,
}

/// `(1 + (K² − 2)t + t²)/(1 − t)³`.
pub fn initial_term(k2: &Rational) -> RationalFunction {
    let q = k2.denom().clone();
    let mid = k2.numer() - BigInt::from(2) * &q;
    let num = IntPolynomial::new(vec![q.clone(), mid, q.clone()]);
    let den = IntPolynomial::one_minus_t_pow(1).pow(3).scale(&q);
    RationalFunction::new(num, den)
}

pub fn assemble_series(basket: &Basket, k2: &Rational) -> HilbertSeries {
    let (parts, _) = basket_contributions(basket);
    let parts: BTreeMap<u64, DeltaVector> = parts.into_iter().filter(|(_, d)| !d.is_zero()).collect();
    let series = parts.values().fold(initial_term(k2), |acc, d| &acc + &d.q_series());
    HilbertSeries { series, k2: k2.clone(), parts }
}

/// Recovers `K²` from the triple pole at `t = 1` and the per-ℓ δ-vectors of the rest.
///
/// Candidate local indices are the maximal `d ≥ 3` (under divisibility) whose
/// cyclotomic polynomial divides the remainder's denominator. A part whose index
/// divides a candidate is folded into that candidate, since the series carries no
/// trace of it; candidates sharing a divisor `d ≥ 3` give `AmbiguousDecomposition`.
pub fn split_series(h: &RationalFunction) -> Result<HilbertSeries> {
    let bad = |m: &str| Err(Error::NotASurfaceSeries(m.to_string()));
    match h.eval(&Rational::zero()) {
        Some(v) if v.is_one() => {}
        _ => return bad("value at t = 0 is not 1"),
    }
    if h.pole_order_at_one() != 3 {
        return bad("pole order at t = 1 is not 3");
    }
    // (1-t)^3 H = -num / (den / (t-1)^3)
    let mut den = h.den().clone();
    for _ in 0..3 {
        den = den.div_by_t_minus_one();
    }
    let one = Rational::one();
    let k2 = -h.num().eval(&one) / den.eval(&one);
    let rest = h - &initial_term(&k2);
    let mut parts = BTreeMap::new();
    if rest.is_zero() {
        return Ok(HilbertSeries { series: h.clone(), k2, parts });
    }
    let divisors = cyclotomic_support(rest.den()).ok_or_else(|| {
        Error::NotASurfaceSeries("remainder denominator is not a product of cyclotomic factors".into())
    })?;
    let big: Vec<u64> = divisors.iter().copied().filter(|&d| d >= 3).collect();
    let cands: Vec<u64> =
        big.iter().copied().filter(|&d| !big.iter().any(|&e| e != d && e % d == 0)).collect();
    if cands.is_empty() {
        return bad("remainder has no orbifold part");
    }
    let lcm = cands.iter().fold(1u64, |l, &d| l.lcm(&d));
    let lcm_us = lcm as usize;
    // W = L(1 - t^L) R must be a polynomial of degree < L
    let scale = RationalFunction::from_poly(IntPolynomial::one_minus_t_pow(lcm_us).scale(&BigInt::from(lcm)));
    let w = &rest * &scale;
    if w.den().degree() != Some(0) {
        return bad("remainder is not of the form P/(1 - t^L)");
    }
    let wden = Rational::from_integer(w.den().coeff(0));
    let target: Vec<Rational> =
        (0..lcm_us).map(|i| Rational::from_integer(w.num().coeff(i)) / &wden).collect();
    if w.num().degree().is_some_and(|d| d >= lcm_us) {
        return bad("remainder is not proper");
    }
    // unknowns: one per palindromic pair (i, ℓ−1−i), 1 ≤ i ≤ ℓ−1−i
    let mut unknowns: Vec<(u64, usize)> = Vec::new();
    for &l in &cands {
        for i in 1..=((l as usize - 1) / 2) {
            unknowns.push((l, i));
        }
    }
    let mut a = vec![vec![Rational::zero(); unknowns.len()]; lcm_us];
    for (col, &(l, i)) in unknowns.iter().enumerate() {
        let lu = l as usize;
        let coef = Rational::from_integer(BigInt::from(lcm / l));
        let mut idx = vec![i];
        if lu - 1 - i != i {
            idx.push(lu - 1 - i);
        }
        for base in idx {
            let mut e = base;
            while e < lcm_us {
                a[e][col] += &coef;
                e += lu;
            }
        }
    }
    let (sol, rank) = solve_rational(a, target).ok_or_else(|| {
        Error::NotASurfaceSeries("remainder is not a sum of orbifold contributions".into())
    })?;
    if rank < unknowns.len() {
        return Err(Error::AmbiguousDecomposition(cands));
    }
    for &l in &cands {
        let mut entries = vec![0i64; l as usize - 2];
        for (col, &(ll, i)) in unknowns.iter().enumerate() {
            if ll != l {
                continue;
            }
            let v = &sol[col];
            if !v.is_integer() {
                return Err(Error::NonIntegralDelta(l));
            }
            let v = v.to_integer().to_i64().ok_or(Error::NonIntegralDelta(l))?;
            entries[i - 1] = v;
            entries[l as usize - 2 - i] = v;
        }
        let dv = DeltaVector::new(l, entries)?;
        if !dv.is_zero() {
            parts.insert(l, dv);
        }
    }
    Ok(HilbertSeries { series: h.clone(), k2, parts })
}

fn totient(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

fn cyclotomic(d: u64, memo: &mut BTreeMap<u64, IntPolynomial>) -> IntPolynomial {
    if let Some(p) = memo.get(&d) {
        return p.clone();
    }
    let mut p = -IntPolynomial::one_minus_t_pow(d as usize);
    for e in 1..d {
        if d % e == 0 {
            let q = cyclotomic(e, memo);
            let (quo, rem) = p.divrem_monic(&q);
            debug_assert!(rem.is_zero());
            p = quo;
        }
    }
    memo.insert(d, p.clone());
    p
}

/// Indices `d` with `Φ_d | p`, or `None` if `p` has a non-cyclotomic factor.
fn cyclotomic_support(p: &IntPolynomial) -> Option<Vec<u64>> {
    let n = p.degree()? as u64;
    let mut memo = BTreeMap::new();
    let mut rest = p.clone();
    let mut out = Vec::new();
    let mut d = 1u64;
    while rest.degree().unwrap_or(0) > 0 && d <= 2 * n * n + 2 {
        if totient(d) <= n {
            let phi = cyclotomic(d, &mut memo);
            let mut hit = false;
            loop {
                let (q, r) = rest.divrem_monic(&phi);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                hit = true;
            }
            if hit {
                out.push(d);
            }
        }
        d += 1;
    }
    (rest.degree() == Some(0)).then_some(out)
}

/// Gaussian elimination over Q. Returns one solution and the rank, or `None` if inconsistent.
fn solve_rational(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<(Vec<Rational>, usize)> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[r];
                b[i] -= t;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some((x, pivots.len()))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    #[test]
    fn smooth_series() {
        let h = assemble_series(&Basket::empty(), &int(9));
        assert_eq!(h.series, RationalFunction::parse("(1+7*t+t^2)/(1-t)^3").unwrap());
        let c = h.series.series(3).unwrap();
        assert_eq!(c, vec![int(1), int(10), int(28)]);
        let s = split_series(&h.series).unwrap();
        assert_eq!(s.k2, int(9));
        assert!(s.parts.is_empty());
    }

    #[test]
    fn coefficient_of_t() {
        let b: Basket = "1/5(1,1), 1/15(1,2)".parse().unwrap();
        let h = assemble_series(&b, &rat(13, 5));
        assert_eq!(h.series.series(2).unwrap()[1], int(4));
    }

    #[test]
    fn t_singularities_are_invisible() {
        let b: Basket = "1/9(1,2)".parse().unwrap();
        assert_eq!(assemble_series(&b, &int(5)).series, assemble_series(&Basket::empty(), &int(5)).series);
    }

    #[test]
    fn split_index_five_example() {
        let h = RationalFunction::parse("(1+(3-2)*t+t^2)/(1-t)^3 + (2*t+t^2+2*t^3)/(5*(1-t^5))").unwrap();
        let s = split_series(&h).unwrap();
        assert_eq!(s.k2, int(3));
        assert_eq!(s.parts.len(), 1);
        assert_eq!(s.parts[&5], DeltaVector::new(5, vec![2, 1, 2]).unwrap());
    }

    #[test]
    fn split_invisible_roundtrip() {
        let b: Basket = "1/6(1,1), 1/3(1,1)".parse().unwrap();
        let s = split_series(&assemble_series(&b, &int(1)).series).unwrap();
        assert_eq!(s.k2, int(1));
        assert!(s.parts.is_empty());
    }

    #[test]
    fn split_rejects_non_surface_series() {
        let e = |s: &str| split_series(&RationalFunction::parse(s).unwrap());
        assert!(matches!(e("(1+t)/(1-t)^2"), Err(Error::NotASurfaceSeries(_))));
        assert!(matches!(e("(2+t)/(1-t)^3"), Err(Error::NotASurfaceSeries(_))));
        assert!(matches!(e("1/(1-t)^3 + t/(1-2*t)"), Err(Error::NotASurfaceSeries(_))));
    }

    #[test]
    fn split_reports_non_integral() {
        let h = RationalFunction::parse("(1+t+t^2)/(1-t)^3 + t^2/(2*(1-t^5))").unwrap();
        assert_eq!(split_series(&h), Err(Error::NonIntegralDelta(5)));
    }

    #[test]
    fn split_reports_ambiguity() {
        // parts at 6 and 9 overlap in the ℓ = 3 subspace
        let b: Basket = "1/12(1,1), 1/18(1,1)".parse().unwrap();
        let h = assemble_series(&b, &int(2));
        assert_eq!(split_series(&h.series), Err(Error::AmbiguousDecomposition(vec![6, 9])));
    }

    #[test]
    fn cyclotomic_support_basic() {
        let p = &IntPolynomial::one_minus_t_pow(6) * &IntPolynomial::one_minus_t_pow(1);
        assert_eq!(cyclotomic_support(&p), Some(vec![1, 2, 3, 6]));
        assert_eq!(cyclotomic_support(&IntPolynomial::from_i64(&[1, -2])), None);
    }
}
