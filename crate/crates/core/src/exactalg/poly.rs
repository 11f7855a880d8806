use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Polynomial in `t` with arbitrary-precision integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// `c * t^n`
    pub fn monomial(c: impl Into<BigInt>, n: usize) -> Self {
        let mut v = vec![BigInt::zero(); n + 1];
        v[n] = c.into();
        Self::new(v)
    }

    /// `1 - t^n`
    pub fn one_minus_t_pow(n: usize) -> Self {
        Self::one() - Self::monomial(1, n)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Exact division of every coefficient by `k`.
    pub fn div_exact(&self, k: &BigInt) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    debug_assert!((c % k).is_zero());
                    c / k
                })
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
    }

    pub fn lowest_nonzero(&self) -> Option<&BigInt> {
        self.coeffs.iter().find(|c| !c.is_zero())
    }

    pub fn to_rat(&self) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    /// Multiplicity of `t = 1` as a root.
    pub fn root_one_multiplicity(&self) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let s: BigInt = p.coeffs.iter().sum();
            if !s.is_zero() {
                return m;
            }
            p = p.div_by_t_minus_one();
            m += 1;
        }
    }

    /// Quotient by `t - 1`; caller guarantees divisibility.
    pub fn div_by_t_minus_one(&self) -> Self {
        // synthetic division at 1, from the top down
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero();
        }
        let mut q = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for i in (1..n).rev() {
            carry += &self.coeffs[i];
            q[i - 1] = carry.clone();
        }
        Self::new(q)
    }

    /// Division with remainder by a polynomial whose leading coefficient is +-1.
    pub fn divrem_monic(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = &d.coeffs[dd];
        assert!(lead.abs().is_one(), "divisor must be monic up to sign");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let f = &r[i] * lead;
            if f.is_zero() {
                continue;
            }
            for j in 0..=dd {
                let sub = &f * &d.coeffs[j];
                r[i - dd + j] -= sub;
            }
            q[i - dd] = f;
        }
        (Self::new(q), Self::new(r))
    }

    pub fn format_in(&self, var: &str) -> String {
        format_terms(self.coeffs.iter().enumerate().map(|(i, c)| (i, c.clone())), var)
    }
}

fn format_terms(terms: impl Iterator<Item = (usize, BigInt)>, var: &str) -> String {
    let mut out = String::new();
    for (i, c) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if i == 0 {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{mag}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_in("t"))
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, o: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || o.is_zero() {
            return IntPolynomial::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        IntPolynomial::new(v)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
owned_ops!(IntPolynomial);
owned_ops!(RatPolynomial);

/// Polynomial with rational coefficients; the working type for Euclid over Q.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatPolynomial {
    coeffs: Vec<Rational>,
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RatPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::new(vec![Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.coeffs[dd].recip();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let f = &r[i] * &inv;
            if f.is_zero() {
                continue;
            }
            for j in 0..=dd {
                let sub = &f * &d.coeffs[j];
                r[i - dd + j] -= sub;
            }
            q[i - dd] = f;
        }
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => Self::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// Scales to a primitive integer polynomial with positive leading coefficient.
    pub fn primitive_part(&self) -> IntPolynomial {
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let p = IntPolynomial::new(ints);
        let mut g = p.content();
        if p.coeffs().last().unwrap().is_negative() {
            g = -g;
        }
        p.div_exact(&g)
    }

    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({c})*t^{i}"));
            }
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl Add for &RatPolynomial {
    type Output = RatPolynomial;
    fn add(self, o: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &RatPolynomial {
    type Output = RatPolynomial;
    fn sub(self, o: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &RatPolynomial {
    type Output = RatPolynomial;
    fn mul(self, o: &RatPolynomial) -> RatPolynomial {
        if self.is_zero() || o.is_zero() {
            return RatPolynomial::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        RatPolynomial::new(v)
    }
}

impl Neg for &RatPolynomial {
    type Output = RatPolynomial;
    fn neg(self) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Inverse of `f` modulo `h` over the rationals, by the extended Euclidean algorithm.
///
/// Returns `u` with `deg u < deg h` and `h | f*u - 1`.
pub fn poly_inverse_mod(f: &IntPolynomial, h: &IntPolynomial) -> Result<RatPolynomial> {
    let hq = h.to_rat();
    assert!(hq.degree().is_some_and(|d| d >= 1), "modulus must have degree >= 1");
    let fq = f.to_rat().rem(&hq);
    // invariant: s_i * f == r_i (mod h)
    let (mut r0, mut r1) = (hq.clone(), fq);
    let (mut s0, mut s1) = (RatPolynomial::zero(), RatPolynomial::one());
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let s = &s0 - &(&q * &s1);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if r0.degree() != Some(0) {
        return Err(Error::NotCoprime);
    }
    let c = r0.coeff(0).recip();
    Ok(s0.scale(&c).rem(&hq))
}
