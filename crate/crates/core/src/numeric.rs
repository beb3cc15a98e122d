//! Small numeric helpers shared across modules: rational literal parsing,
//! grid specifications, compensated summation and logarithms of big values.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Parses a rational literal.
///
/// Accepted forms: integers (`-3`), fractions (`5/12`), decimals (`0.3438`)
/// and scientific notation (`1e-30`, `2.5E3`). All conversions are exact.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::domain("empty rational literal"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num)?;
        let den = parse_int(den)?;
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let exp: i64 = s[i + 1..]
                .parse()
                .map_err(|_| Error::domain(format!("bad exponent in {s:?}")))?;
            (&s[..i], exp)
        }
        None => (s, 0),
    };
    if exponent.unsigned_abs() > 10_000 {
        return Err(Error::domain(format!("exponent out of range in {s:?}")));
    }
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::domain(format!("no digits in {s:?}")));
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(Error::domain(format!("invalid rational literal {s:?}")));
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all.parse::<BigInt>().unwrap_or_default());
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::domain(format!("invalid integer {t:?}")));
    }
    t.parse::<BigInt>()
        .map_err(|_| Error::domain(format!("invalid integer {t:?}")))
}

/// Parses a grid of the form `LO:HI:STEP` into exact rational points
/// `LO, LO+STEP, …` not exceeding `HI`.
pub fn parse_grid(text: &str) -> Result<Vec<BigRational>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::domain(format!(
            "grid must be LO:HI:STEP, got {text:?}"
        )));
    }
    let lo = parse_rational(parts[0])?;
    let hi = parse_rational(parts[1])?;
    let step = parse_rational(parts[2])?;
    if !step.is_positive() {
        return Err(Error::domain("grid step must be positive"));
    }
    if hi < lo {
        return Err(Error::domain("grid upper end below lower end"));
    }
    let count = ((&hi - &lo) / &step).floor().to_integer();
    let count = count
        .to_usize()
        .filter(|&c| c < 1_000_000)
        .ok_or_else(|| Error::domain("grid has too many points"))?;
    Ok((0..=count)
        .map(|i| &lo + &step * BigRational::from_integer(BigInt::from(i)))
        .collect())
}

/// Neumaier compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Natural logarithm of an arbitrary-size natural number.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(r: &BigRational) -> f64 {
    if !r.is_positive() {
        return f64::NAN;
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    ln_biguint(num) - ln_biguint(den)
}

/// Converts a rational to the nearest `f64` (within a few ulps).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln_rational(&r.abs()).exp()
}

/// Formats `r` with `digits` decimals, rounding toward `-∞` (`up = false`)
/// or `+∞` (`up = true`).
pub fn decimal_directed(r: &BigRational, digits: usize, up: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r * BigRational::from_integer(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let negative = n.is_negative();
    let mag = n.abs().to_string();
    let mag = if mag.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - mag.len()), mag)
    } else {
        mag
    };
    let (int_part, frac_part) = mag.split_at(mag.len() - digits);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// `2^-bits` as a rational.
pub fn pow2_neg(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}
