//! Text forms: rationals as `"num/den"`, series as JSON arrays of those,
//! floats as decimal strings alongside their precision.

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `"n/d"`, `"n"` and plain decimals such as `"-0.75"` (read exactly).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((int_part, frac)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits: String = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac);
        let n = Integer::from_str_radix(&digits, 10).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        let den = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        let q = Rational::from((n, den));
        return Ok(if negative { -q } else { q });
    }
    Rational::from_str_radix(s, 10).map_err(|e| Error::Parse(format!("{s}: {e}")))
}

/// Decimal expansion truncated toward zero after `digits` fractional digits.
pub fn decimal_truncated(q: &Rational, digits: usize) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, digits as u32));
    let scaled = Rational::from(q * &scale);
    let trunc = scaled.trunc().into_numer_denom().0;
    let negative = q.cmp0().is_lt();
    let mut body = trunc.abs().to_string();
    if body.len() <= digits {
        body = format!("{}{}", "0".repeat(digits + 1 - body.len()), body);
    }
    let (int_part, frac) = body.split_at(body.len() - digits);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// Scientific-notation decimal with `digits` significant digits.
pub fn float_to_string(x: &Float, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

pub fn rationals_to_json(v: &[Rational]) -> String {
    let strings: Vec<String> = v.iter().map(rational_to_string).collect();
    serde_json::to_string(&strings).expect("string vector serializes")
}

pub fn rationals_from_json(s: &str) -> Result<Vec<Rational>> {
    let strings: Vec<String> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    strings.iter().map(|x| parse_rational(x)).collect()
}
