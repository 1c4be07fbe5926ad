use nalgebra::{DMatrix, DVector};

use super::FixpointError;
use crate::funcspace::FuncEnclosure;
use crate::renorm::{derivative_columns, mid_block, renormalize, RenormElement, TangentVector};
use crate::rigor::IInterval;

/// Reference `(F(0), i, j, t)` of the fixed point for d = 3.8 and d = 5.1.
pub fn reference_scalars(d: f64) -> Option<[f64; 4]> {
    if d == 3.8 {
        Some([-0.83700583021901265, -0.89842138158302138, -0.64345222855602410, 0.44908966263509253])
    } else if d == 5.1 {
        Some([-0.89271858672458115, -0.93765644691994054, -0.68211126486048014, 0.56526098770489580])
    } else {
        None
    }
}

/// Identity diffeomorphisms with the reference scalars (or the d = 3.8 ones
/// for other degrees).
pub fn default_seed(d: f64, n: usize) -> RenormElement {
    let [v, i, j, t] = reference_scalars(d).unwrap_or(reference_scalars(3.8).unwrap());
    RenormElement {
        d,
        v: IInterval::point(v),
        i: IInterval::point(i),
        j: IInterval::point(j),
        t: IInterval::point(t),
        psi: FuncEnclosure::identity(n),
        phi: FuncEnclosure::identity(n),
    }
}

fn residual(z: &RenormElement) -> Result<(TangentVector, f64, crate::renorm::RenormStep), FixpointError> {
    let step = renormalize(z)?;
    let r = step.output.midpoint().diff(z);
    let norm = r.norm_l1();
    Ok((r, norm, step))
}

/// Floating Newton iteration `Z <- Z + (I - DR)^{-1} (R(Z) - Z)` on the full
/// truncated coefficient space, at the degree of `seed`. Stops once the
/// residual is below `1e-13` and no longer halving.
pub fn find_approximate_fixed_point(d: f64, seed: &RenormElement, iters: usize) -> Result<RenormElement, FixpointError> {
    let n = seed.degree();
    let mut z = RenormElement { d, ..seed.midpoint() };
    let (mut r, mut res, mut step) = residual(&z)?;
    let mut best = (res, z.clone());
    for _ in 0..iters {
        let da = mid_block(&derivative_columns(&step, n)?, n);
        let m = da.nrows();
        let a = DMatrix::<f64>::identity(m, m) - da;
        let rhs = DVector::from_iterator(m, r.block(n).iter().map(|c| c.midpoint()));
        let delta = a.lu().solve(&rhs).ok_or(FixpointError::Singular)?;
        let dz: Vec<IInterval> = delta.iter().map(|&x| IInterval::point(x)).collect();
        let next = z.add_tangent(&TangentVector::from_block(n, n, &dz)).midpoint();
        let (r2, res2, step2) = match residual(&next) {
            Ok(x) => x,
            Err(_) if best.0 < 1e-8 => break,
            Err(e) => return Err(e),
        };
        let stagnated = res2 < 1e-13 && res2 > 0.5 * res;
        z = next;
        r = r2;
        res = res2;
        step = step2;
        if res < best.0 {
            best = (res, z.clone());
        }
        if stagnated || res == 0.0 {
            break;
        }
    }
    if best.0 >= 1e-8 {
        return Err(FixpointError::NoConvergence { residual: best.0 });
    }
    Ok(best.1)
}

/// Converges at degree `min(n, 40)` from [`default_seed`], then polishes at
/// degree `n`.
pub fn approximate_fixed_point(d: f64, n: usize) -> Result<RenormElement, FixpointError> {
    let n0 = n.min(40);
    let coarse = find_approximate_fixed_point(d, &default_seed(d, n0), 30)?;
    if n0 == n {
        return Ok(coarse);
    }
    find_approximate_fixed_point(d, &coarse.resized(n).midpoint(), 10)
}
