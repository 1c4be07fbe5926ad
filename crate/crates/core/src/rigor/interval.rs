use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use super::round::{
    add_up, div_up, mul_up, raise, sub_up, FLAG_STRADDLE,
};
use super::RigorError;

/// Closed interval `[lo, hi]` with finite double endpoints.
///
/// Arithmetic operators round outward. Division through the `/` operator
/// records a sticky flag when the divisor contains zero; run such code
/// inside [`crate::rigor::scope`] or use [`IInterval::checked_div`].
#[derive(Clone, Copy, PartialEq, Default)]
pub struct IInterval {
    lo: f64,
    hi: f64,
}

impl IInterval {
    pub const ZERO: IInterval = IInterval { lo: 0.0, hi: 0.0 };
    pub const ONE: IInterval = IInterval { lo: 1.0, hi: 1.0 };
    pub const UNIT: IInterval = IInterval { lo: -1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self, RigorError> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(RigorError::Overflow);
        }
        if lo > hi {
            return Err(RigorError::Inverted { lo, hi });
        }
        Ok(IInterval { lo, hi })
    }

    /// Builds an interval from endpoints already known to be ordered.
    #[inline]
    pub(crate) fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan(), "inverted [{lo}, {hi}]");
        IInterval { lo, hi }
    }

    #[inline]
    pub fn point(x: f64) -> Self {
        if !x.is_finite() {
            raise(super::round::FLAG_OVERFLOW);
            return IInterval { lo: -f64::MAX, hi: f64::MAX };
        }
        IInterval { lo: x, hi: x }
    }

    /// `[c - r, c + r]`, outwardly rounded.
    pub fn ball(c: f64, r: f64) -> Self {
        let r = r.abs();
        IInterval { lo: -add_up(-c, r), hi: add_up(c, r) }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }

    pub fn abs(&self) -> Self {
        let a = 0.0f64.max(self.lo).max(-self.hi);
        let b = -(0.0f64.min(self.lo).min(-self.hi));
        IInterval { lo: a, hi: b }
    }

    /// Largest absolute value of a member.
    #[inline]
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value of a member.
    #[inline]
    pub fn mig(&self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    /// Upper bound of `hi - lo`.
    #[inline]
    pub fn width(&self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// A representable point inside the interval.
    #[inline]
    pub fn midpoint(&self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    pub fn split(&self) -> (Self, Self) {
        let m = self.midpoint();
        (IInterval { lo: self.lo, hi: m }, IInterval { lo: m, hi: self.hi })
    }

    pub fn hull(&self, other: &Self) -> Self {
        IInterval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(IInterval { lo, hi })
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Every member of `self` is strictly below every member of `other`.
    #[inline]
    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    #[inline]
    pub fn certainly_positive(&self) -> bool {
        self.lo > 0.0
    }

    #[inline]
    pub fn certainly_negative(&self) -> bool {
        self.hi < 0.0
    }

    #[inline]
    pub fn excludes_zero(&self) -> bool {
        self.lo > 0.0 || self.hi < 0.0
    }

    pub fn inv(&self) -> Result<Self, RigorError> {
        if !self.excludes_zero() {
            return Err(RigorError::DivisorStraddlesZero);
        }
        Ok(IInterval { lo: -div_up(-1.0, self.hi), hi: div_up(1.0, self.lo) })
    }

    pub fn checked_div(&self, b: &Self) -> Result<Self, RigorError> {
        if !b.excludes_zero() {
            return Err(RigorError::DivisorStraddlesZero);
        }
        Ok(div_nonzero(*self, *b))
    }

    /// `self * s` for a double `s`, outward.
    #[inline]
    pub fn scale(&self, s: f64) -> Self {
        if s >= 0.0 {
            IInterval { lo: -mul_up(-self.lo, s), hi: mul_up(self.hi, s) }
        } else {
            IInterval { lo: -mul_up(-self.hi, s), hi: mul_up(self.lo, s) }
        }
    }

    /// Square, tighter than `self * self` when the interval straddles zero.
    pub fn sqr(&self) -> Self {
        let a = self.abs();
        IInterval { lo: -mul_up(-a.lo, a.lo), hi: mul_up(a.hi, a.hi) }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: u32) -> Self {
        if n == 0 {
            return IInterval::ONE;
        }
        if n % 2 == 0 {
            let a = self.abs();
            return pow_nonneg(a, n);
        }
        if self.lo >= 0.0 {
            pow_nonneg(*self, n)
        } else if self.hi <= 0.0 {
            -pow_nonneg(-*self, n)
        } else {
            let hi = pow_nonneg(IInterval::point(self.hi), n).hi;
            let lo = -pow_nonneg(IInterval::point(-self.lo), n).hi;
            IInterval { lo, hi }
        }
    }

    /// Same interval widened by `r` on both sides.
    pub fn inflate(&self, r: f64) -> Self {
        IInterval { lo: -add_up(-self.lo, r), hi: add_up(self.hi, r) }
    }
}

fn pow_nonneg(a: IInterval, mut n: u32) -> IInterval {
    let mut base = a;
    let mut acc = IInterval::ONE;
    while n > 0 {
        if n & 1 == 1 {
            acc = mul_nonneg(acc, base);
        }
        n >>= 1;
        if n > 0 {
            base = mul_nonneg(base, base);
        }
    }
    acc
}

#[inline]
fn mul_nonneg(a: IInterval, b: IInterval) -> IInterval {
    IInterval { lo: -mul_up(-a.lo, b.lo), hi: mul_up(a.hi, b.hi) }
}

impl From<f64> for IInterval {
    fn from(x: f64) -> Self {
        IInterval::point(x)
    }
}

impl fmt::Debug for IInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for IInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

impl Neg for IInterval {
    type Output = IInterval;
    #[inline]
    fn neg(self) -> IInterval {
        IInterval { lo: -self.hi, hi: -self.lo }
    }
}

impl Add for IInterval {
    type Output = IInterval;
    #[inline]
    fn add(self, b: IInterval) -> IInterval {
        IInterval { lo: -add_up(-self.lo, -b.lo), hi: add_up(self.hi, b.hi) }
    }
}

impl Sub for IInterval {
    type Output = IInterval;
    #[inline]
    fn sub(self, b: IInterval) -> IInterval {
        IInterval { lo: -add_up(-self.lo, b.hi), hi: add_up(self.hi, -b.lo) }
    }
}

impl Mul for IInterval {
    type Output = IInterval;
    #[inline]
    fn mul(self, b: IInterval) -> IInterval {
        mul(self, b)
    }
}

#[inline]
fn mul(a: IInterval, b: IInterval) -> IInterval {
    let (al, ah, bl, bh) = (a.lo, a.hi, b.lo, b.hi);
    if al >= 0.0 {
        if bl >= 0.0 {
            IInterval { lo: -mul_up(-al, bl), hi: mul_up(ah, bh) }
        } else if bh <= 0.0 {
            IInterval { lo: -mul_up(-ah, bl), hi: mul_up(al, bh) }
        } else {
            IInterval { lo: -mul_up(-ah, bl), hi: mul_up(ah, bh) }
        }
    } else if ah <= 0.0 {
        if bl >= 0.0 {
            IInterval { lo: -mul_up(-al, bh), hi: mul_up(ah, bl) }
        } else if bh <= 0.0 {
            IInterval { lo: -mul_up(-ah, bh), hi: mul_up(al, bl) }
        } else {
            IInterval { lo: -mul_up(-al, bh), hi: mul_up(al, bl) }
        }
    } else if bl >= 0.0 {
        IInterval { lo: -mul_up(-al, bh), hi: mul_up(ah, bh) }
    } else if bh <= 0.0 {
        IInterval { lo: -mul_up(-ah, bl), hi: mul_up(al, bl) }
    } else {
        let lo = (-mul_up(-al, bh)).min(-mul_up(-ah, bl));
        let hi = mul_up(al, bl).max(mul_up(ah, bh));
        IInterval { lo, hi }
    }
}

#[inline]
fn div_nonzero(a: IInterval, b: IInterval) -> IInterval {
    if b.lo > 0.0 {
        let hi = if a.hi >= 0.0 { div_up(a.hi, b.lo) } else { div_up(a.hi, b.hi) };
        let lo = if a.lo >= 0.0 { -div_up(-a.lo, b.hi) } else { -div_up(-a.lo, b.lo) };
        IInterval { lo, hi }
    } else {
        -div_nonzero(a, -b)
    }
}

impl Div for IInterval {
    type Output = IInterval;
    #[inline]
    fn div(self, b: IInterval) -> IInterval {
        if !b.excludes_zero() {
            raise(FLAG_STRADDLE);
            return IInterval { lo: -f64::MAX, hi: f64::MAX };
        }
        div_nonzero(self, b)
    }
}

impl Add<f64> for IInterval {
    type Output = IInterval;
    fn add(self, b: f64) -> IInterval {
        self + IInterval::point(b)
    }
}

impl Sub<f64> for IInterval {
    type Output = IInterval;
    fn sub(self, b: f64) -> IInterval {
        self - IInterval::point(b)
    }
}

impl Mul<f64> for IInterval {
    type Output = IInterval;
    fn mul(self, b: f64) -> IInterval {
        self.scale(b)
    }
}

impl Div<f64> for IInterval {
    type Output = IInterval;
    fn div(self, b: f64) -> IInterval {
        self / IInterval::point(b)
    }
}

impl AddAssign for IInterval {
    fn add_assign(&mut self, b: IInterval) {
        *self = *self + b;
    }
}

impl SubAssign for IInterval {
    fn sub_assign(&mut self, b: IInterval) {
        *self = *self - b;
    }
}

impl MulAssign for IInterval {
    fn mul_assign(&mut self, b: IInterval) {
        *self = *self * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> IInterval {
        IInterval::new(a, b).unwrap()
    }

    #[test]
    fn neg_examples() {
        assert_eq!(-iv(1.0, 2.0), iv(-2.0, -1.0));
        assert_eq!(-iv(0.0, 0.0), iv(0.0, 0.0));
        assert_eq!(-iv(-3.0, 5.0), iv(-5.0, 3.0));
    }

    #[test]
    fn abs_examples() {
        assert_eq!(iv(-3.0, 2.0).abs(), iv(0.0, 3.0));
        assert_eq!(iv(1.0, 4.0).abs(), iv(1.0, 4.0));
        assert_eq!(iv(-4.0, -1.0).abs(), iv(1.0, 4.0));
    }

    #[test]
    fn arithmetic_examples() {
        // The image of x + y over [1,2] x [3,4] is [4,6].
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        assert_eq!(iv(-1.0, 2.0) * iv(3.0, 4.0), iv(-4.0, 8.0));
        assert_eq!(iv(2.0, 4.0).inv().unwrap(), iv(0.25, 0.5));
    }

    #[test]
    fn division_by_straddling_interval_fails() {
        assert_eq!(iv(1.0, 2.0).checked_div(&iv(-1.0, 1.0)), Err(RigorError::DivisorStraddlesZero));
        assert_eq!(iv(0.0, 1.0).inv(), Err(RigorError::DivisorStraddlesZero));
        assert!(iv(-1.0, 0.5).inv().is_err());
    }

    #[test]
    fn inverted_endpoints_rejected() {
        assert!(IInterval::new(2.0, 1.0).is_err());
        assert!(IInterval::new(f64::NAN, 1.0).is_err());
        assert!(IInterval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn powi_matches_repeated_product() {
        let a = iv(-0.7, 0.4);
        let p3 = a.powi(3);
        assert!(p3.contains(-0.343) && p3.contains(0.064));
        let p2 = a.powi(2);
        assert!(p2.lo() == 0.0 && p2.contains(0.49));
    }

    #[test]
    fn split_and_hull() {
        let a = iv(-1.0, 3.0);
        let (l, r) = a.split();
        assert_eq!(l, iv(-1.0, 1.0));
        assert_eq!(r, iv(1.0, 3.0));
        assert_eq!(l.hull(&r), a);
        assert_eq!(l.intersect(&r), Some(iv(1.0, 1.0)));
        assert_eq!(iv(0.0, 1.0).intersect(&iv(2.0, 3.0)), None);
    }
}
