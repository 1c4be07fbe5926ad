//! Hexadecimal float literals (`0x1.8p+1`), exact in both directions.

use super::{IInterval, RigorError};

pub fn format_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let esign = if e < 0 { '-' } else { '+' };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{esign}{}", e.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{esign}{}", e.abs())
    }
}

/// Parses a hex float; also accepts plain decimal for hand-written inputs.
/// Hex literals must be exactly representable.
pub fn parse_hex(s: &str) -> Result<f64, RigorError> {
    let bad = || RigorError::Parse(s.to_string());
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let (mant, exp) = match hex.find(['p', 'P']) {
        Some(k) => (&hex[..k], hex[k + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (hex, 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(k) => (&mant[..k], &mant[k + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let mut m: u128 = 0;
    let mut shift: i64 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        let d = c.to_digit(16).ok_or_else(bad)? as u128;
        if m >> 120 != 0 {
            return Err(bad());
        }
        m = (m << 4) | d;
    }
    shift -= 4 * frac_part.len() as i64;
    let e2 = exp + shift;
    if m == 0 {
        return Ok(if neg { -0.0 } else { 0.0 });
    }
    // Normalize to at most 53 significant bits without losing information.
    let mut e2 = e2;
    while m & 1 == 0 {
        m >>= 1;
        e2 += 1;
    }
    if 128 - m.leading_zeros() > 53 {
        return Err(bad());
    }
    let v = ldexp(m as f64, e2).ok_or_else(bad)?;
    if ldexp(v, -e2).map(|w| w as u128) != Some(m) {
        return Err(bad());
    }
    Ok(if neg { -v } else { v })
}

fn ldexp(x: f64, e: i64) -> Option<f64> {
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v *= 2f64.powi(e as i32);
    v.is_finite().then_some(v)
}

pub fn format_interval(a: &IInterval) -> String {
    format!("{} {}", format_hex(a.lo()), format_hex(a.hi()))
}

pub fn parse_interval(line: &str) -> Result<IInterval, RigorError> {
    let mut it = line.split_whitespace();
    let lo = parse_hex(it.next().ok_or_else(|| RigorError::Parse(line.into()))?)?;
    let hi = parse_hex(it.next().ok_or_else(|| RigorError::Parse(line.into()))?)?;
    if it.next().is_some() {
        return Err(RigorError::Parse(line.into()));
    }
    IInterval::new(lo, hi)
}
