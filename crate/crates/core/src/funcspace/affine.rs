use super::{FuncEnclosure, FuncError, PowerTable};
use crate::rigor::IInterval;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Preserving,
    Reversing,
}

/// Affine bijection between an interval `I = [left, right]` and `[-1, 1]`:
/// `s_I` when orientation-preserving, `r_I` when reversing. The endpoints
/// are themselves enclosures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    left: IInterval,
    right: IInterval,
    orientation: Orientation,
}

impl AffineMap {
    pub fn new(left: IInterval, right: IInterval, orientation: Orientation) -> Result<Self, FuncError> {
        if !left.certainly_lt(&right) {
            return Err(FuncError::DegenerateAffine);
        }
        Ok(AffineMap { left, right, orientation })
    }

    pub fn preserving(domain: IInterval) -> Result<Self, FuncError> {
        Self::new(domain.lo().into(), domain.hi().into(), Orientation::Preserving)
    }

    pub fn reversing(domain: IInterval) -> Result<Self, FuncError> {
        Self::new(domain.lo().into(), domain.hi().into(), Orientation::Reversing)
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn center(&self) -> IInterval {
        (self.left + self.right).scale(0.5)
    }

    pub fn half_width(&self) -> IInterval {
        (self.right - self.left).scale(0.5)
    }

    fn signed_slope(&self) -> IInterval {
        match self.orientation {
            Orientation::Preserving => self.half_width(),
            Orientation::Reversing => -self.half_width(),
        }
    }

    /// `I -> [-1, 1]`.
    pub fn to_unit(&self, x: IInterval) -> IInterval {
        (x - self.center()) / self.signed_slope()
    }

    /// `[-1, 1] -> I`.
    pub fn from_unit(&self, x: IInterval) -> IInterval {
        self.center() + self.signed_slope() * x
    }

    /// `from_unit` as a degree-`n` enclosure.
    pub fn as_enclosure(&self, n: usize) -> FuncEnclosure {
        let mut f = FuncEnclosure::zero(n);
        f.set_coeff(0, self.center());
        if n >= 1 {
            f.set_coeff(1, self.signed_slope());
        } else {
            f.add_tail(0, self.half_width().mag());
        }
        f
    }
}

/// `f ∘ a.from_unit`, re-expanded at the degree of `f`.
pub fn compose_affine_pre(f: &FuncEnclosure, a: &AffineMap) -> Result<FuncEnclosure, FuncError> {
    let inner = a.as_enclosure(f.degree());
    PowerTable::new(&inner).compose(f)
}

/// `a.to_unit ∘ f`.
pub fn compose_affine_post(a: &AffineMap, f: &FuncEnclosure) -> Result<FuncEnclosure, FuncError> {
    let s = crate::rigor::scope(|| IInterval::ONE / a.signed_slope())?;
    Ok(f.add_constant(-a.center()).scale(s))
}
