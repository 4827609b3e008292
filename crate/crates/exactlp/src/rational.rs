//! Exact rational numbers and their textual wire format.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Shorthand for the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`. Panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn parse_digits(s: &str, original: &str) -> Result<BigInt, ParseRationalError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(original.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ParseRationalError::Malformed(original.to_string()))
}

/// Parses `"p/q"`, an integer `"n"`, or a finite decimal `"-12.375"`
/// (optionally with an exponent, `"1.5e-3"`) into an exact rational.
///
/// Decimal literals are converted digit-for-digit; nothing passes through
/// binary floating point.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_signed_integer(num.trim(), s)?;
        let den = parse_signed_integer(den.trim(), s)?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s)
}

fn parse_signed_integer(s: &str, original: &str) -> Result<BigInt, ParseRationalError> {
    let (negative, digits) = split_sign(s);
    let value = parse_digits(digits, original)?;
    Ok(if negative { -value } else { value })
}

fn split_sign(s: &str) -> (bool, &str) {
    if let Some(rest) = s.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = s.strip_prefix('+') {
        (false, rest)
    } else {
        (false, s)
    }
}

fn parse_decimal(s: &str) -> Result<Rational, ParseRationalError> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp_text = &s[pos + 1..];
            let (neg, digits) = split_sign(exp_text);
            let magnitude: i64 = digits
                .parse::<u32>()
                .map_err(|_| ParseRationalError::Malformed(s.to_string()))?
                .into();
            (&s[..pos], if neg { -magnitude } else { magnitude })
        }
        None => (s, 0),
    };
    let (negative, unsigned) = split_sign(mantissa);
    let (whole, frac) = match unsigned.split_once('.') {
        Some((w, f)) => (w, f),
        None => (unsigned, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(ParseRationalError::Malformed(s.to_string()));
    }
    let all_digits = format!("{whole}{frac}");
    let numerator = parse_digits(&all_digits, s)?;
    let scale = exponent - frac.len() as i64;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        Rational::from_integer(numerator * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numerator, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Canonical wire form: `"n"` for integers, `"p/q"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Exact rational value of a finite `f64`, or `None` for NaN/infinite.
pub fn from_f64_exact(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

/// Largest power-of-two-free check: true iff `value` has a finite binary
/// expansion (denominator is a power of two).
pub fn is_dyadic(value: &Rational) -> bool {
    let mut den = value.denom().clone();
    let two = BigInt::from(2u32);
    while den.is_even() {
        den /= &two;
    }
    den.is_one()
}

/// Absolute value helper that keeps call sites short.
pub fn abs(value: &Rational) -> Rational {
    value.abs()
}
