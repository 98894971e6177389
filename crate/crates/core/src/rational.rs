//! Exact rational helpers shared by every module.
//!
//! All discrete payoffs and every closed-form value are carried as
//! [`BigRational`]. Decimal literals such as `0.4` parse to the exact
//! fraction `2/5`, so a value computed from user input never picks up
//! binary floating-point error.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Largest accepted decimal exponent magnitude (`1e64`, `1e-64`).
pub const MAX_EXPONENT: u32 = 64;

/// Largest accepted number of digits in any component of a literal.
pub const MAX_DIGITS: usize = 512;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `numer / denom`; panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn half() -> Rational {
    ratio(1, 2)
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn is_unit_interval(value: &Rational) -> bool {
    !value.is_negative() && value <= &Rational::one()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("invalid character {0:?} in number")]
    InvalidCharacter(char),
    #[error("malformed number {0:?}")]
    Malformed(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("exponent out of range (|e| <= {MAX_EXPONENT})")]
    ExponentRange,
    #[error("too many digits (max {MAX_DIGITS})")]
    TooLong,
}

/// Parses `p`, `p/q`, decimals (`-0.125`) and scientific notation (`2.5e-3`)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some(bad) = text
        .chars()
        .find(|ch| !(ch.is_ascii_digit() || matches!(ch, '+' | '-' | '.' | '/' | 'e' | 'E')))
    {
        return Err(ParseRationalError::InvalidCharacter(bad));
    }
    if let Some((numer, denom)) = text.split_once('/') {
        let numer = parse_integer(numer, true).ok_or_else(|| malformed(text))?;
        let denom = parse_integer(denom, false).ok_or_else(|| malformed(text))?;
        if denom.is_zero() {
            return Err(ParseRationalError::ZeroDenominator);
        }
        return Ok(Rational::new(numer, denom));
    }

    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], Some(&text[pos + 1..])),
        None => (text, None),
    };
    let (negative, unsigned) = split_sign(mantissa);
    let (whole, frac) = match unsigned.split_once('.') {
        Some((whole, frac)) => (whole, frac),
        None => (unsigned, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(malformed(text));
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(malformed(text));
    }
    if whole.len() + frac.len() > MAX_DIGITS {
        return Err(ParseRationalError::TooLong);
    }

    let digits = format!("{whole}{frac}");
    let mut numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| malformed(text))?
    };
    if negative {
        numer = -numer;
    }
    let mut scale: i64 = -(frac.len() as i64);
    if let Some(exp) = exponent {
        let exp = parse_integer(exp, true).ok_or_else(|| malformed(text))?;
        let exp = exp
            .to_i64()
            .filter(|e| e.unsigned_abs() <= u64::from(MAX_EXPONENT))
            .ok_or(ParseRationalError::ExponentRange)?;
        scale += exp;
    }
    let ten = BigInt::from(10);
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        Rational::from_integer(numer * power)
    } else {
        Rational::new(numer, power)
    })
}

fn malformed(text: &str) -> ParseRationalError {
    ParseRationalError::Malformed(text.to_owned())
}

fn split_sign(text: &str) -> (bool, &str) {
    match text.as_bytes().first() {
        Some(b'-') => (true, &text[1..]),
        Some(b'+') => (false, &text[1..]),
        _ => (false, text),
    }
}

fn parse_integer(text: &str, signed: bool) -> Option<BigInt> {
    let (negative, digits) = if signed { split_sign(text) } else { (false, text) };
    if digits.is_empty() || digits.len() > MAX_DIGITS || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let value: BigInt = digits.parse().ok()?;
    Some(if negative { -value } else { value })
}

/// Canonical `p/q` (or `p` for integers) rendering, the form used in every
/// machine-readable output.
pub struct Canonical<'a>(pub &'a Rational);

impl fmt::Display for Canonical<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn canonical(value: &Rational) -> String {
    Canonical(value).to_string()
}
