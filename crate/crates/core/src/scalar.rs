//! Numeric backends.
//!
//! Every population and assignment quantity is generic over [`Scalar`]. The
//! exact backend is [`Rational`] (arbitrary precision); `f64` exists for
//! instances whose positive rates are irrational, where equalities are decided
//! up to an absolute tolerance.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Default absolute tolerance of the floating-point backend.
pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Tolerance used when a caller does not supply one.
    const DEFAULT_TOLERANCE: f64;

    /// True when comparisons ignore the tolerance argument.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    /// `n / d` for small integers.
    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&ratio(n, d))
    }

    fn to_f64(&self) -> f64;

    /// `self == other`, up to `tol` for inexact backends.
    fn near(&self, other: &Self, tol: f64) -> bool;

    /// `self <= other`, up to `tol` for inexact backends.
    fn at_most(&self, other: &Self, tol: f64) -> bool;

    fn is_near_zero(&self, tol: f64) -> bool {
        self.near(&Self::zero(), tol)
    }

    /// Strictly positive beyond the tolerance.
    fn is_positive_beyond(&self, tol: f64) -> bool {
        !self.at_most(&Self::zero(), tol)
    }
}

impl Scalar for Rational {
    const DEFAULT_TOLERANCE: f64 = 0.0;
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn at_most(&self, other: &Self, _tol: f64) -> bool {
        self <= other
    }
}

impl Scalar for f64 {
    const DEFAULT_TOLERANCE: f64 = DEFAULT_FLOAT_TOLERANCE;
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn at_most(&self, other: &Self, tol: f64) -> bool {
        *self <= *other + tol
    }
}

/// Converts a rational to the nearest-ish `f64`, staying accurate when the
/// numerator and denominator individually overflow `f64`.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 60;
    let (n, d) = if shift > 0 {
        (r.numer() >> shift as usize, r.denom() >> shift as usize)
    } else {
        (r.numer().clone(), r.denom().clone())
    };
    match (n.to_f64(), d.to_f64()) {
        (Some(n), Some(d)) if d != 0.0 => n / d,
        (Some(n), _) if n != 0.0 => {
            if r.is_positive() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        }
        _ => 0.0,
    }
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Integer square root of a non-negative big integer, rounded down.
pub fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(n.sign() != Sign::Minus);
    n.sqrt()
}

/// Exact square root of a non-negative rational, if it is rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = isqrt(r.numer());
    let d = isqrt(r.denom());
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Rational enclosure `[lo, hi]` of `sqrt(r)` with `hi - lo <= 2^-bits`.
/// Collapses to a point when the root is rational.
pub fn sqrt_enclosure(r: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(!r.is_negative(), "square root of a negative rational");
    if let Some(s) = exact_sqrt(r) {
        return (s.clone(), s);
    }
    // floor(sqrt(r * 4^bits)) / 2^bits <= sqrt(r) < (that + 1) / 2^bits
    let scale = BigInt::one() << bits as usize;
    let scaled = (r.numer() * &scale * &scale) / r.denom();
    let lo = isqrt(&scaled);
    let hi = &lo + BigInt::one();
    (Rational::new(lo, scale.clone()), Rational::new(hi, scale))
}

/// Parses `"a/b"`, `"a"`, or a decimal literal such as `"0.25"` or `"-1.5e-3"`
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty number".to_string());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| format!("invalid numerator in {t:?}"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| format!("invalid denominator in {t:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(t).ok_or_else(|| format!("not a rational or decimal literal: {t:?}"))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(all * num::pow(ten, scale as usize))
    } else {
        Rational::new(all, num::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Canonical text form: `"a/b"`, or `"a"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1.5e-3").unwrap(), ratio(-3, 2000));
        assert_eq!(parse_rational("2").unwrap(), integer(2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&ratio(2, 6)), "1/3");
        assert_eq!(format_rational(&integer(-4)), "-4");
        assert_eq!(format_rational(&ratio(0, 5)), "0");
    }

    #[test]
    fn sqrt_enclosure_brackets_root() {
        let two = integer(2);
        let (lo, hi) = sqrt_enclosure(&two, 128);
        assert!(&lo * &lo < two && two < &hi * &hi);
        assert_eq!(
            &hi - &lo,
            Rational::new(BigInt::one(), BigInt::one() << 128usize)
        );
        let (lo, hi) = sqrt_enclosure(&ratio(9, 16), 128);
        assert_eq!(lo, ratio(3, 4));
        assert_eq!(hi, ratio(3, 4));
    }

    #[test]
    fn float_conversion_survives_huge_parts() {
        let big = BigInt::one() << 2000usize;
        let r = Rational::new(&big * BigInt::from(3), &big * BigInt::from(4));
        assert_eq!(rational_to_f64(&r), 0.75);
        let r = Rational::new(
            BigInt::from(1) + (BigInt::one() << 1100usize),
            BigInt::one() << 1101usize,
        );
        assert!((rational_to_f64(&r) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn float_backend_uses_tolerance() {
        assert!(1.0f64.near(&(1.0 + 1e-12), 1e-9));
        assert!(!1.0f64.near(&1.1, 1e-9));
        assert!(integer(1).near(&integer(1), 0.5));
        assert!(!integer(1).near(&ratio(3, 2), 1.0));
    }
}
