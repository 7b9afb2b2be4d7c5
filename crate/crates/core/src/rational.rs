//! Arbitrary-precision rationals and the handful of helpers the rest of the
//! crate needs on top of [`num_rational::BigRational`].

use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Canonical rational: reduced, positive denominator.
pub type Rat = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

pub fn pow2(exp: i64) -> Rat {
    if exp >= 0 {
        Rat::from_integer(BigInt::one() << (exp as usize))
    } else {
        Rat::new(BigInt::one(), BigInt::one() << ((-exp) as usize))
    }
}

/// `floor(x * 2^bits)`.
pub fn floor_scaled(x: &Rat, bits: u32) -> BigInt {
    let scaled = x.numer() << (bits as usize);
    scaled.div_floor(x.denom())
}

/// `ceil(x * 2^bits)`.
pub fn ceil_scaled(x: &Rat, bits: u32) -> BigInt {
    let scaled = x.numer() << (bits as usize);
    -((-scaled).div_floor(x.denom()))
}

pub fn dyadic(numer: BigInt, bits: u32) -> Rat {
    Rat::new(numer, BigInt::one() << (bits as usize))
}

/// Smallest `k` with `2^k >= x` for positive `x`, as a signed exponent.
pub fn ceil_log2(x: &Rat) -> i64 {
    debug_assert!(x.is_positive());
    let n = x.numer().bits() as i64;
    let d = x.denom().bits() as i64;
    // 2^(n-1) <= numer < 2^n and likewise for denom, so log2(x) lies in (n-1-d, n-d+1).
    let mut k = n - d - 1;
    while pow2(k) < *x {
        k += 1;
    }
    k
}

/// Rational upper bound of `sqrt(x)` with relative slack about `2^-bits`.
/// Exact when `x` is the square of a rational.
pub fn sqrt_upper(x: &Rat, bits: u32) -> Rat {
    sqrt_bound(x, bits, true)
}

/// Rational lower bound of `sqrt(x)`; exact on perfect squares.
pub fn sqrt_lower(x: &Rat, bits: u32) -> Rat {
    sqrt_bound(x, bits, false)
}

fn sqrt_bound(x: &Rat, bits: u32, upper: bool) -> Rat {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if x.is_zero() {
        return Rat::zero();
    }
    let (n, d) = (x.numer().to_biguint().unwrap(), x.denom().to_biguint().unwrap());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &rn * &rn == n && &rd * &rd == d {
        return Rat::new(BigInt::from(rn), BigInt::from(rd));
    }
    // sqrt(n/d) = sqrt(n*d*4^k) / (d*2^k)
    let k = bits as usize + 2;
    let radicand: BigUint = (&n * &d) << (2 * k);
    let mut root = radicand.sqrt();
    if upper && &root * &root != radicand {
        root += 1u32;
    }
    Rat::new(BigInt::from(root), BigInt::from(d) << k)
}

pub fn abs_max(a: &Rat, b: &Rat) -> Rat {
    let (a, b) = (a.abs(), b.abs());
    if a > b {
        a
    } else {
        b
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Error returned when a string is not a canonical-syntax rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError(pub String);

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad rational {:?}", self.0)
    }
}

impl core::error::Error for ParseRatError {}

fn parse_int(s: &str, allow_sign: bool) -> Option<BigInt> {
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) if allow_sign => (Sign::Minus, rest),
        Some(_) => return None,
        None => (Sign::Plus, s),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mag = BigUint::parse_bytes(digits.as_bytes(), 10)?;
    Some(BigInt::from_biguint(sign, mag))
}

/// Parses `"p/q"` or `"p"`. Decimals, whitespace and zero denominators are rejected.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (parse_int(n, true).ok_or_else(err)?, parse_int(d, false).ok_or_else(err)?),
        None => (parse_int(s, true).ok_or_else(err)?, BigInt::one()),
    };
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rat::new(num, den))
}

/// Canonical `"p/q"` text; the denominator is always written.
pub fn format_rat(x: &Rat) -> String {
    alloc::format!("{}/{}", x.numer(), x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("-3").unwrap(), int(-3));
        assert_eq!(format_rat(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rat(&int(0)), "0/1");
        for bad in ["3/0", "1.5", " 1/2", "1/-2", "", "/2", "1/", "--1", "1/2/3"] {
            assert!(parse_rat(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn scaled_rounding() {
        assert_eq!(floor_scaled(&rat(-3, 2), 0), BigInt::from(-2));
        assert_eq!(ceil_scaled(&rat(-3, 2), 0), BigInt::from(-1));
        assert_eq!(floor_scaled(&rat(5, 3), 2), BigInt::from(6));
        assert_eq!(ceil_scaled(&rat(5, 3), 2), BigInt::from(7));
        assert_eq!(ceil_scaled(&int(2), 3), BigInt::from(16));
    }

    #[test]
    fn log2_and_sqrt() {
        assert_eq!(ceil_log2(&int(1)), 0);
        assert_eq!(ceil_log2(&int(2)), 1);
        assert_eq!(ceil_log2(&int(3)), 2);
        assert_eq!(ceil_log2(&rat(1, 3)), -1);
        assert_eq!(ceil_log2(&rat(1, 4)), -2);
        assert_eq!(sqrt_upper(&rat(9, 4), 10), rat(3, 2));
        let two = int(2);
        let (lo, hi) = (sqrt_lower(&two, 30), sqrt_upper(&two, 30));
        assert!(&lo * &lo < two && &hi * &hi > two);
        assert!(&hi - &lo <= pow2(-30));
        let four_minus = rat(3999, 1000);
        assert!(sqrt_upper(&four_minus, 20) <= int(2));
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
