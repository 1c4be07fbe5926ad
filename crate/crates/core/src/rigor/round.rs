//! Upward-rounded primitives.
//!
//! Every function returns the smallest double that is `>=` the exact real
//! result (or a slightly larger one near the underflow threshold). Lower
//! bounds are obtained by negation: `down(a op b) = -up(-(a op b))`.
//!
//! The rounding direction is emulated from round-to-nearest with error-free
//! transformations, so no FPU control word is touched.

use std::cell::Cell;

/// Below this magnitude the FMA/TwoSum residuals are not trusted and the
/// result is bumped unconditionally.
const TINY: f64 = 1.0e-290;

pub(crate) const FLAG_OVERFLOW: u8 = 1;
pub(crate) const FLAG_STRADDLE: u8 = 2;
pub(crate) const FLAG_NEGATIVE_BASE: u8 = 4;

thread_local! {
    static FLAGS: Cell<u8> = const { Cell::new(0) };
}

#[inline]
pub(crate) fn raise(flag: u8) {
    FLAGS.with(|f| f.set(f.get() | flag));
}

#[inline]
pub(crate) fn take_flags() -> u8 {
    FLAGS.with(|f| f.replace(0))
}

#[inline]
pub(crate) fn set_flags(v: u8) {
    FLAGS.with(|f| f.set(v));
}

#[inline]
fn finite_or_flag(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        raise(FLAG_OVERFLOW);
        if x.is_nan() {
            f64::MAX
        } else {
            x.signum() * f64::MAX
        }
    }
}

/// `a + b` rounded up.
#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return finite_or_flag(s);
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// `a - b` rounded up.
#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// `a * b` rounded up.
#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return finite_or_flag(p);
    }
    if p == 0.0 && (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    if p.abs() < TINY {
        return p.next_up();
    }
    let e = a.mul_add(b, -p);
    if e > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// `a / b` rounded up. `b` must be nonzero.
#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return finite_or_flag(q);
    }
    if a == 0.0 {
        return 0.0;
    }
    if q.abs() < TINY || a.abs() < TINY {
        return q.next_up();
    }
    let r = (-q).mul_add(b, a);
    if r != 0.0 && ((r > 0.0) == (b > 0.0)) {
        q.next_up()
    } else {
        q
    }
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    -add_up(-a, -b)
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    -add_up(-a, b)
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    -mul_up(-a, b)
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    -div_up(-a, b)
}

/// Upper bound of a sum of nonnegative terms.
pub fn sum_up<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().fold(0.0, add_up)
}
