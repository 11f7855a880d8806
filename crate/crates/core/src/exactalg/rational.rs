use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Largest integer not exceeding `q`.
pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// `q mod 1`, always in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - Rational::from_integer(floor(q))
}

pub fn is_nonneg_integer(q: &Rational) -> bool {
    is_integer(q) && !q.is_negative()
}

pub fn to_i64(n: &BigInt) -> Option<i64> {
    i64::try_from(n).ok()
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_drops_unit_denominator() {
        assert_eq!(rat(6, 3).to_string(), "2");
        assert_eq!(rat(-8, 5).to_string(), "-8/5");
        assert_eq!(rat(3, -6).to_string(), "-1/2");
    }

    #[test]
    fn floor_and_frac() {
        assert_eq!(floor(&rat(68, 5)), BigInt::from(13));
        assert_eq!(floor(&rat(-8, 5)), BigInt::from(-2));
        assert_eq!(frac(&rat(-8, 5)), rat(2, 5));
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rational(" 13/5"), Some(rat(13, 5)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
