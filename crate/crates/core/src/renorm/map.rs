use super::{power_map_eval, RenormElement, RenormError};
use crate::funcspace::{AffineMap, FuncEnclosure, Orientation};
use crate::rigor::{pow_real, scope_result, IInterval};

/// Member of the period-two cycle `{F, G} = {(f, g), (f, -g)}`: the sign of
/// the `J` branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CycleMember {
    F,
    G,
}

impl CycleMember {
    /// `F` for even `n`, `G` for odd `n`.
    pub fn of_level(n: usize) -> Self {
        if n % 2 == 0 {
            CycleMember::F
        } else {
            CycleMember::G
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            CycleMember::F => 1.0,
            CycleMember::G => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            CycleMember::F => CycleMember::G,
            CycleMember::G => CycleMember::F,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    J,
    T,
}

/// A map of class A as a real function on `J ∪ T`:
/// `x -> sign * psi(s_J^{-1} x)` on `J`, `x -> phi(p_v(x / t))` on `T`.
#[derive(Clone, Debug)]
pub struct ClassAMap {
    pub elem: RenormElement,
    pub member: CycleMember,
    j_map: AffineMap,
    critical_value: IInterval,
}

/// Splits `[-1, 1]` into `pieces` cells and checks `f' > 0` on each.
pub fn certify_increasing(f: &FuncEnclosure, pieces: usize) -> Result<bool, RenormError> {
    let h = 2.0 / pieces as f64;
    for k in 0..pieces {
        let lo = -1.0 + h * k as f64;
        let hi = if k + 1 == pieces { 1.0 } else { -1.0 + h * (k + 1) as f64 };
        let x = IInterval::new(lo, hi)?;
        if !f.eval_derivative(x)?.certainly_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

impl ClassAMap {
    /// Wraps `elem`; `psi` and `phi` must be certified increasing.
    pub fn new(elem: &RenormElement, member: CycleMember) -> Result<Self, RenormError> {
        elem.check()?;
        for (name, f) in [("psi", &elem.psi), ("phi", &elem.phi)] {
            if !certify_increasing(f, 256)? {
                return Err(RenormError::CombinatoricsBroken(format!("{name} not certified increasing")));
            }
        }
        let j_map = AffineMap::new(elem.i, elem.j, Orientation::Preserving)?;
        let critical_value = elem.critical_value()?;
        Ok(ClassAMap { elem: elem.clone(), member, j_map, critical_value })
    }

    /// Same map with `psi`, `phi` re-expanded at degree `m` for faster evaluation.
    pub fn truncated(&self, m: usize) -> Self {
        let mut elem = self.elem.clone();
        elem.psi = elem.psi.truncated_for_eval(m);
        elem.phi = elem.phi.truncated_for_eval(m);
        ClassAMap { elem, ..self.clone() }
    }

    pub fn with_member(&self, member: CycleMember) -> Self {
        ClassAMap { member, ..self.clone() }
    }

    pub fn t(&self) -> IInterval {
        self.elem.t
    }

    /// `J = [i, j]` as a hull of the endpoint enclosures.
    pub fn j_hull(&self) -> IInterval {
        self.elem.i.hull(&self.elem.j)
    }

    /// `J` shrunk to the part certainly inside it.
    pub fn j_inner(&self) -> Option<IInterval> {
        IInterval::new(self.elem.i.hi(), self.elem.j.lo()).ok()
    }

    /// `T` shrunk to the part certainly inside it.
    pub fn t_inner(&self) -> IInterval {
        IInterval::raw(-self.elem.t.lo(), self.elem.t.lo())
    }

    /// `T` widened to contain every possible `T`.
    pub fn t_outer(&self) -> IInterval {
        IInterval::raw(-self.elem.t.hi(), self.elem.t.hi())
    }

    pub fn critical_value(&self) -> IInterval {
        self.critical_value
    }

    /// The branch certainly containing `x`, if any.
    pub fn branch(&self, x: IInterval) -> Option<Branch> {
        if self.t_inner().contains_interval(&x) {
            Some(Branch::T)
        } else if self.j_inner().is_some_and(|j| j.contains_interval(&x)) {
            Some(Branch::J)
        } else {
            None
        }
    }

    /// `x` certainly misses `J ∪ T`.
    pub fn certainly_outside(&self, x: IInterval) -> bool {
        let t = self.t_outer();
        let misses_t = x.hi() < t.lo() || x.lo() > t.hi();
        let misses_j = x.hi() < self.elem.i.lo() || x.lo() > self.elem.j.hi();
        misses_t && misses_j
    }

    fn eval_j(&self, y: IInterval) -> Result<IInterval, RenormError> {
        let w = self.elem.psi.eval(y)?;
        Ok(if self.member == CycleMember::G { -w } else { w })
    }

    /// Direct interval evaluation on the branch containing `x`.
    pub fn eval(&self, x: IInterval) -> Result<IInterval, RenormError> {
        scope_result(|| match self.branch(x) {
            Some(Branch::J) => {
                let y = self.j_map.to_unit(x);
                self.eval_j(clamp_unit(y))
            }
            Some(Branch::T) => {
                if x.is_zero() {
                    return Ok(self.critical_value);
                }
                let p = power_map_eval(self.elem.v, self.elem.d, x / self.elem.t)?;
                Ok(self.elem.phi.eval(clamp_unit(p))?)
            }
            None => Err(RenormError::CombinatoricsBroken(format!("{x:?} not in a single branch"))),
        })
    }

    /// Image of an interval through the monotone pieces: endpoint evaluation
    /// on each side of the critical point. `None` if `x` is not certainly in
    /// one branch.
    pub fn image(&self, x: IInterval) -> Result<Option<IInterval>, RenormError> {
        let Some(branch) = self.branch(x) else { return Ok(None) };
        scope_result(|| {
            let out = match branch {
                Branch::J => {
                    let a = self.eval_j(clamp_unit(self.j_map.to_unit(x.lo().into())))?;
                    let b = self.eval_j(clamp_unit(self.j_map.to_unit(x.hi().into())))?;
                    a.hull(&b)
                }
                Branch::T => {
                    let t = self.elem.t;
                    let far = IInterval::point(x.mag()) / t;
                    let top = self.phi_p(far)?;
                    let bottom = if x.contains(0.0) {
                        self.critical_value
                    } else {
                        self.phi_p(IInterval::point(x.mig()) / t)?
                    };
                    bottom.hull(&top)
                }
            };
            Ok(Some(out))
        })
    }

    fn phi_p(&self, y: IInterval) -> Result<IInterval, RenormError> {
        let u = clamp_unit(y.abs());
        let p = self.elem.v + (IInterval::ONE - self.elem.v) * pow_real(u, self.elem.d)?;
        Ok(self.elem.phi.eval(clamp_unit(p))?)
    }
}

/// Intersects with `[-1, 1]`; values outside come only from overestimation
/// of quantities known to lie in it.
fn clamp_unit(x: IInterval) -> IInterval {
    x.intersect(&IInterval::UNIT).unwrap_or(x)
}
