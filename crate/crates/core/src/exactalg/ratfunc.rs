use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{IntPolynomial, RatPolynomial};
use super::rational::Rational;
use crate::error::{Error, Result};

/// Reduced quotient of integer polynomials in `t`.
///
/// Canonical form: numerator and denominator coprime over Q, no common integer
/// content, lowest-order nonzero denominator coefficient positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: IntPolynomial,
    den: IntPolynomial,
}

impl RationalFunction {
    pub fn new(num: IntPolynomial, den: IntPolynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RationalFunction { num, den: IntPolynomial::one() };
        }
        let g = RatPolynomial::gcd(&num.to_rat(), &den.to_rat());
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            let g = g.primitive_part();
            (exact_quotient(&num, &g), exact_quotient(&den, &g))
        } else {
            (num, den)
        };
        let mut c = num.content().gcd(&den.content());
        if den.lowest_nonzero().unwrap().is_negative() {
            c = -c;
        }
        RationalFunction { num: num.div_exact(&c), den: den.div_exact(&c) }
    }

    pub fn from_poly(p: IntPolynomial) -> Self {
        Self::new(p, IntPolynomial::one())
    }

    pub fn constant(c: i64) -> Self {
        Self::from_poly(IntPolynomial::constant(c))
    }

    pub fn t() -> Self {
        Self::from_poly(IntPolynomial::monomial(1, 1))
    }

    pub fn zero() -> Self {
        Self::constant(0)
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self::new(
            IntPolynomial::constant(q.numer().clone()),
            IntPolynomial::constant(q.denom().clone()),
        )
    }

    pub fn num(&self) -> &IntPolynomial {
        &self.num
    }

    pub fn den(&self) -> &IntPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::Parse("division by zero".into()));
        }
        Ok(Self::new(self.den.clone(), self.num.clone()))
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let n = e.unsigned_abs() as u32;
        Ok(Self::new(base.num.pow(n), base.den.pow(n)))
    }

    /// Value at `t = x`, or `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Order of the pole at `t = 1` (negative for a zero).
    pub fn pole_order_at_one(&self) -> i64 {
        if self.num.is_zero() {
            return i64::MIN;
        }
        self.den.root_one_multiplicity() as i64 - self.num.root_one_multiplicity() as i64
    }

    /// First `n` power-series coefficients about `t = 0`.
    pub fn series(&self, n: usize) -> Option<Vec<Rational>> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return None;
        }
        let d0 = Rational::from_integer(d0);
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = Rational::from_integer(self.num.coeff(k));
            let dd = self.den.coeffs();
            for (j, dj) in dd.iter().enumerate().skip(1).take(k) {
                if !dj.is_zero() {
                    s -= Rational::from_integer(dj.clone()) * &out[k - j];
                }
            }
            out.push(s / &d0);
        }
        Some(out)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Parser::new(s).parse()
    }
}

fn exact_quotient(p: &IntPolynomial, g: &IntPolynomial) -> IntPolynomial {
    let (q, r) = p.to_rat().divrem(&g.to_rat());
    debug_assert!(r.is_zero());
    let l = q.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    debug_assert!(l.is_one(), "Gauss lemma: quotient by a primitive factor is integral");
    IntPolynomial::new(q.coeffs().iter().map(|c| c.to_integer()).collect())
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == IntPolynomial::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, o: &RationalFunction) -> RationalFunction {
        self * &o.recip().expect("division by zero rational function")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: RationalFunction) -> RationalFunction {
        &self + &o
    }
}

impl Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: RationalFunction) -> RationalFunction {
        &self - &o
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: RationalFunction) -> RationalFunction {
        &self * &o
    }
}

// expr  := term (('+'|'-') term)*
// term  := unary (('*'|'/') unary)*
// unary := '-' unary | '+' unary | power
// power := atom ('^' ['-'] integer)?
// atom  := integer | 't' | '(' expr ')'
struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, bytes: src.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<RationalFunction> {
        let v = self.expr()?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.eat(b'/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return self.err("division by zero");
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if self.eat(b'-') {
            Ok(-&self.unary()?)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let Some(e) = self.integer() else {
                return self.err("expected integer exponent");
            };
            let Ok(e) = i64::try_from(&e) else {
                return self.err("exponent too large");
            };
            let e = if neg { -e } else { e };
            if e < 0 && base.is_zero() {
                return self.err("division by zero");
            }
            return base.powi(e);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            None
        } else {
            self.src[start..self.pos].parse().ok()
        }
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(v)
            }
            Some(b't') => {
                self.pos += 1;
                Ok(RationalFunction::t())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer().unwrap();
                Ok(RationalFunction::from_poly(IntPolynomial::constant(n)))
            }
            _ => self.err("expected integer, 't' or '('"),
        }
    }
}
