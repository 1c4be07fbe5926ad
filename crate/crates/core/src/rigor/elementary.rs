//! Enclosures of `ln`, `exp` and real powers.
//!
//! The platform `ln`/`exp` are accurate to within one ulp; each endpoint is
//! pushed outward by [`WIDEN_ULPS`] ulps, which covers that error with margin.

use super::round::{raise, FLAG_NEGATIVE_BASE, FLAG_OVERFLOW};
use super::{IInterval, RigorError};

pub const WIDEN_ULPS: u32 = 2;

fn bump_up(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_up();
    }
    x
}

fn bump_down(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_down();
    }
    x
}

fn ln_up(x: f64) -> f64 {
    if x == 1.0 {
        return 0.0;
    }
    bump_up(x.ln(), WIDEN_ULPS)
}

fn ln_down(x: f64) -> f64 {
    if x == 1.0 {
        return 0.0;
    }
    bump_down(x.ln(), WIDEN_ULPS)
}

fn exp_up(y: f64) -> f64 {
    if y == 0.0 {
        return 1.0;
    }
    let e = y.exp();
    if !e.is_finite() {
        raise(FLAG_OVERFLOW);
        return f64::MAX;
    }
    if e < f64::MIN_POSITIVE {
        return f64::MIN_POSITIVE;
    }
    bump_up(e, WIDEN_ULPS)
}

fn exp_down(y: f64) -> f64 {
    if y == 0.0 {
        return 1.0;
    }
    let e = y.exp();
    if !e.is_finite() {
        raise(FLAG_OVERFLOW);
        return f64::MAX;
    }
    if e < f64::MIN_POSITIVE {
        return 0.0;
    }
    bump_down(e, WIDEN_ULPS).max(0.0)
}

/// Natural logarithm of a positive interval.
pub fn ln(a: IInterval) -> Result<IInterval, RigorError> {
    if a.lo() <= 0.0 {
        return Err(RigorError::NegativeBase);
    }
    IInterval::new(ln_down(a.lo()), ln_up(a.hi()))
}

pub fn exp(a: IInterval) -> IInterval {
    IInterval::raw(exp_down(a.lo()), exp_up(a.hi()))
}

fn integer_exponent(d: f64) -> Option<u32> {
    (d.fract() == 0.0 && (1.0..=64.0).contains(&d)).then_some(d as u32)
}

/// Enclosure of `{x^d : x in a}` for `a >= 0`, `d > 0`.
pub fn pow_real(a: IInterval, d: f64) -> Result<IInterval, RigorError> {
    if a.lo() < 0.0 {
        return Err(RigorError::NegativeBase);
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(RigorError::BadExponent(d));
    }
    if let Some(n) = integer_exponent(d) {
        return Ok(a.powi(n));
    }
    Ok(pow_unchecked(a, d))
}

fn pow_unchecked(a: IInterval, d: f64) -> IInterval {
    let lo = if a.lo() == 0.0 {
        0.0
    } else {
        exp_down(IInterval::point(ln_down(a.lo())).scale(d).lo())
    };
    let hi = if a.hi() == 0.0 {
        0.0
    } else {
        exp_up(IInterval::point(ln_up(a.hi())).scale(d).hi())
    };
    IInterval::raw(lo, hi.max(lo))
}

/// Enclosure of `{x^(1/d) : x in a}` for `a >= 0`, `d > 0`.
pub fn root_real(a: IInterval, d: f64) -> Result<IInterval, RigorError> {
    if a.lo() < 0.0 {
        return Err(RigorError::NegativeBase);
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(RigorError::BadExponent(d));
    }
    let dd = IInterval::point(d);
    let lo = if a.lo() == 0.0 {
        0.0
    } else {
        exp_down((IInterval::point(ln_down(a.lo())) / dd).lo())
    };
    let hi = if a.hi() == 0.0 {
        0.0
    } else {
        exp_up((IInterval::point(ln_up(a.hi())) / dd).hi())
    };
    Ok(IInterval::raw(lo, hi.max(lo)))
}

/// `pow_real` for use inside a [`super::scope`]: a negative base raises the
/// sticky flag instead of returning an error.
pub fn pow_flagged(a: IInterval, d: f64) -> IInterval {
    match pow_real(a, d) {
        Ok(r) => r,
        Err(_) => {
            raise(FLAG_NEGATIVE_BASE);
            IInterval::raw(0.0, f64::MAX)
        }
    }
}

/// `root_real` for use inside a [`super::scope`].
pub fn root_flagged(a: IInterval, d: f64) -> IInterval {
    match root_real(a, d) {
        Ok(r) => r,
        Err(_) => {
            raise(FLAG_NEGATIVE_BASE);
            IInterval::raw(0.0, f64::MAX)
        }
    }
}
