//! Helpers for exact rationals: parsing, printing and small conversions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Parses `p`, `-p` or `p/q` into a reduced rational. Returns `None` on
/// malformed text or a zero denominator.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Prints a rational as `p` when integral and `p/q` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Greatest common divisor of two rationals: the positive generator of the
/// subgroup of Q they generate (zero when both are zero).
pub fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    use num_integer::Integer;
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    BigRational::new(num, a.denom() * b.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("5/6"), Some(frac(5, 6)));
        assert_eq!(parse_rational(" -10/4 "), Some(frac(-5, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&frac(-5, 2)), "-5/2");
        assert_eq!(format_rational(&frac(8, 4)), "2");
    }

    #[test]
    fn gcd_of_rationals() {
        assert_eq!(rational_gcd(&frac(1, 2), &frac(1, 3)), frac(1, 6));
        assert_eq!(rational_gcd(&frac(2, 3), &frac(4, 3)), frac(2, 3));
        assert_eq!(rational_gcd(&int(0), &frac(-3, 4)), frac(3, 4));
        assert_eq!(factorial(4), BigInt::from(24));
    }
}
