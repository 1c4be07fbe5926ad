//! Sign of the Schwarzian, the postcritical orbit and the Koebe constant.

use rayon::prelude::*;

use crate::renorm::{ClassAMap, CycleMember, RenormElement, RenormError};
use crate::rigor::round::{add_up, div_up, mul_up};
use crate::rigor::{pow_real, scope_result, IInterval};

#[derive(Debug, thiserror::Error)]
pub enum DistortionError {
    #[error("Schwarzian sign inconclusive on [{lo}, {hi}] ({branch} branch) after maximal refinement")]
    Inconclusive { branch: &'static str, lo: f64, hi: f64 },
    #[error("T1 is not certainly inside the bracket [x4, -x4/t]")]
    NoSpace,
    #[error("orbit point x_{index} = {x:?} is not in a single branch")]
    BranchAmbiguous { index: usize, x: IInterval },
    #[error("postcritical relation fails: {0}")]
    Relation(String),
    #[error(transparent)]
    Renorm(#[from] RenormError),
}

impl From<crate::funcspace::FuncError> for DistortionError {
    fn from(e: crate::funcspace::FuncError) -> Self {
        DistortionError::Renorm(e.into())
    }
}

impl From<crate::rigor::RigorError> for DistortionError {
    fn from(e: crate::rigor::RigorError) -> Self {
        DistortionError::Renorm(e.into())
    }
}

const MAX_DEPTH: u32 = 24;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Sign {
    NonPositive,
    Positive,
    Unknown,
}

fn sign_of(x: IInterval) -> Sign {
    if x.hi() <= 0.0 {
        Sign::NonPositive
    } else if x.lo() > 0.0 {
        Sign::Positive
    } else {
        Sign::Unknown
    }
}

/// `f''' f' - 3/2 f''^2` on `y`.
fn numerator(f: &crate::funcspace::FuncEnclosure, y: IInterval) -> Result<IInterval, DistortionError> {
    let d1 = f.eval_deriv(y, 1)?;
    let d2 = f.eval_deriv(y, 2)?;
    let d3 = f.eval_deriv(y, 3)?;
    Ok(d3 * d1 - d2.sqr().scale(1.5))
}

/// Schwarzian numerator of `phi ∘ p_v(x / t)` divided by `|x / t|^{2d-4}`,
/// as a function of `u = |x / t|` in `[0, 1]`:
/// `A^4 u^{2d} N_phi(p) - A^2 (d^2 - 1) phi'(p)^2 / (2 t^2)`, `A = d (1 - v) / t`.
fn t_branch_normalized(f: &RenormElement, u: IInterval) -> Result<IInterval, DistortionError> {
    scope_result(|| {
        let d = f.d;
        let one_v = IInterval::ONE - f.v;
        let a = one_v * d / f.t;
        let ud = pow_real(u, d)?;
        let p = (f.v + one_v * ud).intersect(&IInterval::UNIT).unwrap_or(IInterval::UNIT);
        let n_phi = numerator(&f.phi, p)?;
        let dphi = f.phi.eval_deriv(p, 1)?;
        let a2 = a.sqr();
        let lead = a2.sqr() * ud.sqr() * n_phi;
        let power = a2 * (d * d - 1.0) * dphi.sqr() / (f.t.sqr().scale(2.0));
        Ok(lead - power)
    })
}

fn check_cells(
    cells: Vec<IInterval>,
    branch: &'static str,
    eval: &(dyn Fn(IInterval) -> Result<IInterval, DistortionError> + Sync),
) -> Result<bool, DistortionError> {
    let results: Vec<Result<bool, DistortionError>> = cells
        .into_par_iter()
        .map(|cell| {
            let mut stack = vec![(cell, 0u32)];
            while let Some((c, depth)) = stack.pop() {
                match sign_of(eval(c)?) {
                    Sign::NonPositive => {}
                    Sign::Positive => return Ok(false),
                    Sign::Unknown if depth < MAX_DEPTH && c.width() > 0.0 => {
                        let (a, b) = c.split();
                        stack.push((a, depth + 1));
                        stack.push((b, depth + 1));
                    }
                    Sign::Unknown => return Err(DistortionError::Inconclusive { branch, lo: c.lo(), hi: c.hi() }),
                }
            }
            Ok(true)
        })
        .collect();
    // A certified positive cell decides the question even if another cell
    // stayed inconclusive.
    if results.iter().any(|r| matches!(r, Ok(false))) {
        return Ok(false);
    }
    results.into_iter().try_for_each(|r| r.map(|_| ()))?;
    Ok(true)
}

fn mesh_cells(lo: f64, hi: f64, mesh: usize) -> Vec<IInterval> {
    let h = (hi - lo) / mesh as f64;
    (0..mesh)
        .map(|k| {
            let a = lo + h * k as f64;
            let b = if k + 1 == mesh { hi } else { lo + h * (k + 1) as f64 };
            IInterval::raw(a, b)
        })
        .collect()
}

/// Certifies `S(F) <= 0` on `J ∪ T` over `mesh` cells per branch with
/// adaptive bisection. On `T` the numerator is divided by `|x/t|^{2d-4}`,
/// which regularizes the critical point. `Ok(false)` means a cell was
/// certified positive.
pub fn schwarzian_nonpositive(f: &RenormElement, mesh: usize) -> Result<bool, DistortionError> {
    let mesh = mesh.max(2);
    let j_ok = check_cells(mesh_cells(-1.0, 1.0, mesh), "J", &|y| scope_result(|| numerator(&f.psi, y)))?;
    if !j_ok {
        return Ok(false);
    }
    check_cells(mesh_cells(0.0, 1.0, mesh), "T", &|u| t_branch_normalized(f, u))
}

/// Orbit `x_n = F^n(0)` of the critical point.
#[derive(Clone, Debug, PartialEq)]
pub struct PostcriticalData {
    pub x: Vec<IInterval>,
    pub lambda: IInterval,
    pub member: CycleMember,
}

impl PostcriticalData {
    fn rel(&self, k: usize, factor: IInterval, what: &str) -> Result<(), DistortionError> {
        let want = factor * self.x[4];
        if self.x[k].intersect(&want).is_none() {
            return Err(DistortionError::Relation(format!("{what}: x_{k} = {:?}, expected {want:?}", self.x[k])));
        }
        Ok(())
    }

    /// The self-similarity relations: `x_7 = ±λ x_4`, `x_11 = -λ² x_4`,
    /// `x_18 = ∓λ³ x_4` (upper sign for `F`).
    pub fn check_self_similarity(&self) -> Result<(), DistortionError> {
        let l = self.lambda;
        let s = self.member.sign();
        self.rel(7, l * s, "x7")?;
        self.rel(11, -l.sqr(), "x11")?;
        if self.x.len() > 18 {
            self.rel(18, -l.powi(3) * s, "x18")?;
        }
        Ok(())
    }

    /// For `G`: the postcritical order
    /// `x1 < x6 < x12 < x4 < x5 < x13 < x11 < x3 < x7 < x2` and `0 < x13 < -x5`,
    /// as certified strict inequalities. Nothing to check for `F`.
    pub fn check_orderings(&self) -> Result<(), DistortionError> {
        if self.member == CycleMember::F {
            return Ok(());
        }
        let order = [1, 6, 12, 4, 5, 13, 11, 3, 7, 2];
        for w in order.windows(2) {
            if !self.x[w[0]].certainly_lt(&self.x[w[1]]) {
                return Err(DistortionError::Relation(format!("x{} < x{} not certified", w[0], w[1])));
            }
        }
        if !(self.x[13].certainly_positive() && self.x[13].certainly_lt(&-self.x[5])) {
            return Err(DistortionError::Relation("0 < x13 < -x5 not certified".into()));
        }
        Ok(())
    }
}

/// Critical orbit of `member` up to `x_upto`.
pub fn postcritical_orbit_of(
    f: &RenormElement,
    upto: usize,
    member: CycleMember,
) -> Result<PostcriticalData, DistortionError> {
    let map = ClassAMap::new(f, member)?;
    let mut x = vec![IInterval::ZERO];
    for n in 0..upto {
        let cur = x[n];
        match map.image(cur)? {
            Some(next) => x.push(next),
            None => return Err(DistortionError::BranchAmbiguous { index: n, x: cur }),
        }
    }
    Ok(PostcriticalData { x, lambda: f.lambda(), member })
}

/// Critical orbit of `F` (orientation-preserving `J` branch).
pub fn postcritical_orbit(f: &RenormElement, upto: usize) -> Result<PostcriticalData, DistortionError> {
    postcritical_orbit_of(f, upto, CycleMember::F)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionBound {
    pub tau: IInterval,
    pub c: f64,
}

/// Upper bound of `(1 + tau)^2 / tau^2 = (1 + 1/tau)^2`, decreasing in `tau`.
pub fn koebe_from_tau(tau: IInterval) -> Option<f64> {
    if !tau.certainly_positive() {
        return None;
    }
    let r = add_up(1.0, div_up(1.0, tau.lo()));
    Some(mul_up(r, r))
}

/// Koebe space of `T_1 = [-t, t]` inside `[x_4, -x_4 / t]`:
/// `tau = min(-t - x_4, -x_4/t - t) / (2t)`, and `C <= (1 + tau)^2 / tau^2`.
pub fn koebe_constant(f: &RenormElement) -> Result<DistortionBound, DistortionError> {
    let orbit = postcritical_orbit(f, 4)?;
    koebe_from_orbit(f.t, orbit.x[4])
}

pub fn koebe_from_orbit(t: IInterval, x4: IInterval) -> Result<DistortionBound, DistortionError> {
    let tau = scope_result(|| {
        let left = -t - x4;
        let right = -x4 / t - t;
        if !(left.certainly_positive() && right.certainly_positive()) {
            return Err(DistortionError::NoSpace);
        }
        let gap = IInterval::raw(left.lo().min(right.lo()), left.hi().min(right.hi()));
        Ok(gap / t.scale(2.0))
    })?;
    let c = koebe_from_tau(tau).ok_or(DistortionError::NoSpace)?;
    Ok(DistortionBound { tau, c })
}

#[cfg(test)]
mod tests;
