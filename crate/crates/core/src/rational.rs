//! Exact rational numbers and their textual forms.
//!
//! Every probability in the crate is a [`Rational`]: an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. Parsing never
//! goes through binary floating point.

use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

mod gcd;
pub mod ops;

/// Why a probability literal could not be read.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiteralError {
    #[error("empty literal")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `p/q` (non-negative integers, `q > 0`) or a plain decimal literal
/// such as `0.125` or `3`. A decimal with `d` fractional digits becomes
/// `digits / 10^d` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, LiteralError> {
    if text.is_empty() {
        return Err(LiteralError::Empty);
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_digits(num).ok_or_else(|| LiteralError::Malformed(text.to_string()))?;
        let den = parse_digits(den).ok_or_else(|| LiteralError::Malformed(text.to_string()))?;
        if den.is_zero() {
            return Err(LiteralError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rational::new(num.into(), den.into()));
    }
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(LiteralError::Malformed(text.to_string()));
    }
    let mut digits = String::with_capacity(int_part.len() + frac_part.len());
    digits.push_str(int_part);
    digits.push_str(frac_part);
    let num = parse_digits(&digits).ok_or_else(|| LiteralError::Malformed(text.to_string()))?;
    let den = BigUint::from(10u32).pow(frac_part.len());
    Ok(Rational::new(num.into(), den.into()))
}

fn parse_digits(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
}

/// Renders `r` as `p/q`, or just `p` when the denominator is one.
pub fn fraction_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64` to `r`.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering of a rational, rounded to nearest (ties away from zero)
/// at a fixed number of significant digits, trailing zeros trimmed.
///
/// Magnitudes in `[1e-5, 1e17)` use positional notation, everything else
/// scientific (`1.5e-9`).
pub struct Decimal<'a> {
    value: &'a Rational,
    significant: usize,
}

/// Default significant digits for [`decimal`].
pub const DEFAULT_SIGNIFICANT_DIGITS: usize = 17;

pub fn decimal(value: &Rational) -> Decimal<'_> {
    Decimal {
        value,
        significant: DEFAULT_SIGNIFICANT_DIGITS,
    }
}

impl<'a> Decimal<'a> {
    pub fn with_significant_digits(value: &'a Rational, significant: usize) -> Self {
        assert!(significant > 0);
        Decimal { value, significant }
    }
}

impl fmt::Display for Decimal<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let value = self.value;
        if value.is_zero() {
            return f.write_str("0");
        }
        let negative = value.is_negative();
        let abs = value.abs();
        let ten = BigInt::from(10);

        // exponent e with 10^e <= |v| < 10^(e+1)
        let mut exp = estimate_exponent(&abs);
        let pow10 = |k: i64| -> Rational {
            if k >= 0 {
                Rational::from_integer(ten.clone().pow(k as u64))
            } else {
                Rational::new(BigInt::one(), ten.clone().pow((-k) as u64))
            }
        };
        while abs < pow10(exp) {
            exp -= 1;
        }
        while abs >= pow10(exp + 1) {
            exp += 1;
        }

        let sig = self.significant as i64;
        let scaled = &abs * pow10(sig - 1 - exp);
        let (q, r) = scaled.numer().div_rem(scaled.denom());
        let mut digits = if r.clone() * 2 >= *scaled.denom() { q + 1 } else { q };
        if digits >= ten.clone().pow(sig as u64) {
            digits /= &ten;
            exp += 1;
        }
        let digits = digits.to_str_radix(10);
        debug_assert_eq!(digits.len() as i64, sig);

        if negative {
            f.write_str("-")?;
        }
        if (-5..17).contains(&exp) {
            let mut out = String::new();
            if exp < 0 {
                out.push_str("0.");
                for _ in 0..(-exp - 1) {
                    out.push('0');
                }
                out.push_str(&digits);
            } else {
                let int_len = (exp + 1) as usize;
                if int_len >= digits.len() {
                    out.push_str(&digits);
                    for _ in digits.len()..int_len {
                        out.push('0');
                    }
                } else {
                    out.push_str(&digits[..int_len]);
                    out.push('.');
                    out.push_str(&digits[int_len..]);
                }
            }
            f.write_str(trim_fraction(&out))
        } else {
            let mut mantissa = String::new();
            mantissa.push_str(&digits[..1]);
            if digits.len() > 1 {
                mantissa.push('.');
                mantissa.push_str(&digits[1..]);
            }
            write!(f, "{}e{}", trim_fraction(&mantissa), exp)
        }
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn estimate_exponent(abs: &Rational) -> i64 {
    // decimal digit counts give an estimate within one of the true exponent
    let num_digits = abs.numer().magnitude().to_str_radix(10).len() as i64;
    let den_digits = abs.denom().magnitude().to_str_radix(10).len() as i64;
    num_digits - den_digits
}

/// Sign of a rational as -1, 0 or 1.
pub(crate) fn sign(r: &Rational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
