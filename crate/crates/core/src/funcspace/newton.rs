use super::{FuncEnclosure, FuncError};
use crate::rigor::round::{div_up, mul_down, sub_down};
use crate::rigor::IInterval;

/// A real function with interval enclosures of its values and derivative.
pub trait Differentiable {
    fn value(&self, x: IInterval) -> Result<IInterval, FuncError>;
    fn derivative(&self, x: IInterval) -> Result<IInterval, FuncError>;
}

impl Differentiable for FuncEnclosure {
    fn value(&self, x: IInterval) -> Result<IInterval, FuncError> {
        self.eval(x)
    }

    fn derivative(&self, x: IInterval) -> Result<IInterval, FuncError> {
        self.eval_derivative(x)
    }
}

/// Adapter turning a pair of closures into a [`Differentiable`].
pub struct FnPair<F, G>(pub F, pub G);

impl<F, G> Differentiable for FnPair<F, G>
where
    F: Fn(IInterval) -> Result<IInterval, FuncError>,
    G: Fn(IInterval) -> Result<IInterval, FuncError>,
{
    fn value(&self, x: IInterval) -> Result<IInterval, FuncError> {
        (self.0)(x)
    }

    fn derivative(&self, x: IInterval) -> Result<IInterval, FuncError> {
        (self.1)(x)
    }
}

/// Certifies the solution of `f(x) = a` near `x0`.
///
/// With `c = f'(x0)` and the Newton map `N(x) = x - (f(x) - a)/c`, checks
/// `D = sup_{B_delta(x0)} |1 - f'/c| < 1` and `eps = |N(x0) - x0| < (1-D) delta`.
/// Then every `a* in a` has exactly one solution in `B_delta(x0)`, and it lies
/// within `eps / (1 - D)` of `x0`.
pub fn newton_solve(f: &impl Differentiable, a: IInterval, x0: f64, delta: f64) -> Result<IInterval, FuncError> {
    crate::rigor::scope_result(|| {
        let c = f.derivative(IInterval::point(x0))?.midpoint();
        if c == 0.0 || !c.is_finite() {
            return Err(FuncError::DerivativeVanishes);
        }
        let cc = IInterval::point(c);
        let ball = IInterval::ball(x0, delta);
        let dball = f.derivative(ball)?;
        let d = (IInterval::ONE - dball / cc).mag();
        let eps = ((f.value(IInterval::point(x0))? - a) / cc).mag();
        let room = sub_down(1.0, d);
        if !(d < 1.0) || !(eps < mul_down(room, delta)) {
            return Err(FuncError::NoCertificate { eps, d_bound: d, delta });
        }
        Ok(IInterval::ball(x0, div_up(eps, room)))
    })
}

/// Solves `f(x) = a` from a rough `guess`: a floating Newton predictor,
/// then [`newton_solve`] with a radius of 64 times the predictor residual,
/// grown by 8 on failure.
pub fn solve_inverse(f: &impl Differentiable, a: IInterval, guess: f64) -> Result<IInterval, FuncError> {
    let target = a.midpoint();
    let mut x = guess;
    for _ in 0..60 {
        let fx = f.value(IInterval::point(x))?.midpoint();
        let dfx = f.derivative(IInterval::point(x))?.midpoint();
        if dfx == 0.0 || !dfx.is_finite() {
            return Err(FuncError::DerivativeVanishes);
        }
        let step = (fx - target) / dfx;
        let next = (x - step).clamp(-1.0, 1.0);
        let done = (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300);
        x = next;
        if done {
            break;
        }
    }
    let resid = crate::rigor::scope_result(|| {
        let c = f.derivative(IInterval::point(x))?;
        Ok::<_, FuncError>(((f.value(IInterval::point(x))? - a) / c).mag())
    })
    .unwrap_or(0.0);
    let floor = 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
    let mut delta = (64.0 * resid).max(floor);
    let mut last = FuncError::DerivativeVanishes;
    for _ in 0..8 {
        match newton_solve(f, a, x, delta) {
            Ok(r) => return Ok(r),
            Err(e @ FuncError::NoCertificate { .. }) => last = e,
            Err(e) => return Err(e),
        }
        delta *= 8.0;
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_tight() {
        let id = FuncEnclosure::identity(3);
        let r = newton_solve(&id, IInterval::point(0.3), 0.3, 1e-10).unwrap();
        assert!(r.contains(0.3));
        assert!(r.width() <= 2.0 * (0.3f64.next_up() - 0.3));
    }

    #[test]
    fn square_root_of_quarter() {
        let sq = FuncEnclosure::monomial(3, 2);
        let r = newton_solve(&sq, IInterval::point(0.25), 0.49, 0.05).unwrap();
        assert!(r.contains(0.5));
        let r = solve_inverse(&sq, IInterval::point(0.25), 0.7).unwrap();
        assert!(r.contains(0.5) && r.width() < 1e-14);
    }

    #[test]
    fn result_maps_back_into_target() {
        let f = FuncEnclosure::from_points(6, &[0.05, 0.8, 0.1, -0.05]);
        let a = IInterval::new(0.3, 0.3 + 1e-12).unwrap();
        let r = solve_inverse(&f, a, 0.0).unwrap();
        assert!(f.eval(r).unwrap().intersect(&a).is_some());
    }

    #[test]
    fn failures_are_reported() {
        let sq = FuncEnclosure::monomial(3, 2);
        assert_eq!(newton_solve(&sq, IInterval::point(0.25), 0.0, 0.1), Err(FuncError::DerivativeVanishes));
        assert!(matches!(
            newton_solve(&sq, IInterval::point(0.25), 0.3, 1e-6),
            Err(FuncError::NoCertificate { .. })
        ));
    }
}
