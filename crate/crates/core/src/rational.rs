//! Small helpers around `BigRational`: construction, parsing of decimal
//! literals and truncated decimal rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), k as usize)
}

pub fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

/// Parses `"0.30"`, `"-2.5e3"`, `"1e-10"`, `"3/7"` or `"12"` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational literal: {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    if neg {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let value = if scale >= 0 {
        BigRational::from_integer(numer * pow10(scale as u32))
    } else {
        BigRational::new(numer, pow10((-scale) as u32))
    };
    Ok(value)
}

/// Renders `x` with exactly `digits` fractional digits, truncating toward zero.
pub fn to_decimal(x: &BigRational, digits: u32) -> String {
    let scaled = x * BigRational::from_integer(pow10(digits));
    format_scaled(&scaled.trunc().to_integer(), digits, x.is_negative())
}

/// `digits` fractional decimals, rounded down (`up = false`) or up.
pub fn to_decimal_directed(x: &BigRational, digits: u32, up: bool) -> String {
    let scaled = x * BigRational::from_integer(pow10(digits));
    let t = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    format_scaled(&t, digits, t.is_negative())
}

/// Formats an integer `t` representing `t / 10^digits`.
pub(crate) fn format_scaled(t: &BigInt, digits: u32, negative: bool) -> String {
    let (ip, fp) = t.abs().div_rem(&pow10(digits));
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits as usize)
    }
}

/// Lossless conversion of a finite `f64` to a rational.
pub fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Number of bits in the larger of numerator and denominator.
pub fn bit_size(x: &BigRational) -> u64 {
    x.numer().bits().max(x.denom().bits())
}

/// Outward rounding to a multiple of `2^-bits`.
pub fn floor_to_bits(x: &BigRational, bits: u32) -> BigRational {
    let s = BigRational::from_integer(pow2(bits));
    BigRational::new((x * &s).floor().to_integer(), pow2(bits))
}

pub fn ceil_to_bits(x: &BigRational, bits: u32) -> BigRational {
    let s = BigRational::from_integer(pow2(bits));
    BigRational::new((x * &s).ceil().to_integer(), pow2(bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_forms() {
        assert_eq!(parse_rational("0.30").unwrap(), ratio(3, 10));
        assert_eq!(parse_rational("1e-10").unwrap(), BigRational::new(1.into(), pow10(10)));
        assert_eq!(parse_rational("-2.5e3").unwrap(), int(-2500));
        assert_eq!(parse_rational("3/7").unwrap(), ratio(3, 7));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn decimal_truncates_toward_zero() {
        assert_eq!(to_decimal(&ratio(2, 3), 4), "0.6666");
        assert_eq!(to_decimal(&ratio(-2, 3), 4), "-0.6666");
        assert_eq!(to_decimal(&ratio(7, 2), 0), "3");
        assert_eq!(to_decimal(&ratio(1, 200), 2), "0.00");
        assert_eq!(to_decimal_directed(&ratio(2, 3), 4, true), "0.6667");
        assert_eq!(to_decimal_directed(&ratio(-2, 3), 4, false), "-0.6667");
        assert_eq!(to_decimal_directed(&ratio(-1, 1000), 2, true), "0.00");
    }

    #[test]
    fn outward_rounding_brackets() {
        let x = ratio(1, 3);
        assert!(floor_to_bits(&x, 10) <= x && x <= ceil_to_bits(&x, 10));
    }
}
