use super::{RenormElement, RenormError};
use crate::funcspace::{solve_inverse, AffineMap, FuncEnclosure, FuncError, Orientation, PowerTable};
use crate::rigor::round::{add_up, div_up, mul_up, sub_down};
use crate::rigor::{pow_real, root_real, scope_result, IInterval};

/// `p_v(x) = v + (1 - v)|x|^d`.
pub fn power_map_eval(v: IInterval, d: f64, x: IInterval) -> Result<IInterval, RenormError> {
    Ok(v + (IInterval::ONE - v) * pow_real(x.abs(), d)?)
}

/// Everything computed while renormalizing an element; the intermediate
/// quantities are reused by the linearization.
#[derive(Clone, Debug)]
pub struct RenormStep {
    pub input: RenormElement,
    pub output: RenormElement,
    /// `psi^{-1}(-t)`, `psi^{-1}(t)`.
    pub y_minus: IInterval,
    pub y_plus: IInterval,
    /// `phi^{-1}(s_J(y_-))`, `phi^{-1}(s_J(y_+))`: the interval `K = [k1, k2]`.
    pub k1: IInterval,
    pub k2: IInterval,
    /// `phi^{-1}(t)`, `phi^{-1}(-t)`.
    pub z_plus: IInterval,
    pub z_minus: IInterval,
    /// Arguments of the `d`-th roots giving `i~`, `j~`, `t~`.
    pub u_i: IInterval,
    pub u_j: IInterval,
    pub u_t: IInterval,
    /// `P = p_v ∘ s_{J~}` and `Q = s_J^{-1} ∘ phi ∘ s_K` with their power tables.
    pub(crate) p: FuncEnclosure,
    pub(crate) p_table: PowerTable,
    pub(crate) phi_p: FuncEnclosure,
    pub(crate) q: FuncEnclosure,
    pub(crate) q_table: PowerTable,
    pub(crate) sk_table: PowerTable,
}

/// `(1 + a x)^e` on `[-1, 1]` for `|a| < 1`, with a rigorous remainder in slot `n`.
pub fn binomial_series(a: IInterval, e: f64, n: usize) -> Result<FuncEnclosure, RenormError> {
    let am = a.mag();
    if !(am < 1.0) {
        return Err(RenormError::CombinatoricsBroken(format!("binomial ratio {am} not below 1")));
    }
    let mut f = FuncEnclosure::zero(n);
    let mut term = IInterval::ONE;
    let ep = IInterval::point(e);
    for k in 0..=n {
        f.set_coeff(k, term);
        term = term * a * (ep - IInterval::point(k as f64)) / IInterval::point((k + 1) as f64);
    }
    // `term` is now the coefficient of x^{n+1}. Terms decrease geometrically
    // once k > e; sum the ones before that explicitly.
    let mut tail = 0.0;
    let mut k = n + 1;
    let mut mag = term.mag();
    while (k as f64) <= e {
        tail = add_up(tail, mag);
        let ratio = div_up((e - k as f64).abs().next_up(), (k + 1) as f64);
        mag = mul_up(mul_up(mag, am), ratio);
        k += 1;
    }
    tail = add_up(tail, div_up(mag, sub_down(1.0, am)));
    f.add_tail(n, tail);
    Ok(f)
}

/// `|c + h x|^e` for `x` in `[-1, 1]`, when `c` is bounded away from zero
/// and `|h| < |c|`.
pub fn abs_affine_power(c: IInterval, h: IInterval, e: f64, n: usize) -> Result<FuncEnclosure, RenormError> {
    if !c.excludes_zero() {
        return Err(RenormError::CombinatoricsBroken("affine power centre meets 0".into()));
    }
    let scale = pow_real(c.abs(), e)?;
    Ok(binomial_series(h / c, e, n)?.scale(scale))
}

fn preimage(f: &FuncEnclosure, a: IInterval, what: &str) -> Result<IInterval, RenormError> {
    if !(a.lo() > -1.0 && a.hi() < 1.0) {
        return Err(RenormError::CombinatoricsBroken(format!("{what}: target {a:?} leaves (-1, 1)")));
    }
    match solve_inverse(f, a, a.midpoint()) {
        Ok(x) if x.lo() >= -1.0 && x.hi() <= 1.0 => Ok(x),
        Ok(x) => Err(RenormError::CombinatoricsBroken(format!("{what}: preimage {x:?} leaves [-1, 1]"))),
        Err(FuncError::DomainViolation(_)) => {
            Err(RenormError::CombinatoricsBroken(format!("{what}: no preimage in [-1, 1]")))
        }
        Err(e) => Err(e.into()),
    }
}

fn positive_root(u: IInterval, d: f64, what: &str) -> Result<IInterval, RenormError> {
    if !u.certainly_positive() {
        return Err(RenormError::CombinatoricsBroken(format!("{what}: {u:?} not positive")));
    }
    Ok(root_real(u, d)?)
}

/// `P = p_v ∘ s_{J~}` where `J~ = [i~, j~]` is the left component of
/// `(phi ∘ p_v)^{-1}(T)`. The reversing branch uses `r` on the mirrored right
/// component `[-j~, -i~]`; since `p_v` is even both give the same series.
pub(crate) fn p_enclosure(
    v: IInterval,
    d: f64,
    it: IInterval,
    jt: IInterval,
    orientation: Orientation,
    n: usize,
) -> Result<FuncEnclosure, RenormError> {
    let map = match orientation {
        Orientation::Preserving => AffineMap::new(it, jt, orientation)?,
        Orientation::Reversing => AffineMap::new(-jt, -it, orientation)?,
    };
    let c = map.center();
    let h = match orientation {
        Orientation::Preserving => map.half_width(),
        Orientation::Reversing => -map.half_width(),
    };
    let s = abs_affine_power(c, h, d, n)?;
    Ok(s.scale(IInterval::ONE - v).add_constant(v))
}

/// `psi~ = r_T^{-1} ∘ phi ∘ P` with `r_T^{-1}(y) = -y / t`.
pub fn psi_tilde(f: &RenormElement, it: IInterval, jt: IInterval, orientation: Orientation) -> Result<FuncEnclosure, RenormError> {
    scope_result(|| {
        let p = p_enclosure(f.v, f.d, it, jt, orientation, f.degree())?;
        let phi_p = PowerTable::new(&p).compose(&f.phi)?;
        Ok(phi_p.scale(-(IInterval::ONE / f.t)))
    })
}

/// One application of the renormalization operator.
pub fn renormalize(f: &RenormElement) -> Result<RenormStep, RenormError> {
    f.check()?;
    scope_result(|| {
        let n = f.degree();
        let (v, i, j, t, d) = (f.v, f.i, f.j, f.t, f.d);
        let lam_j = (j - i).scale(0.5);
        let m_j = (i + j).scale(0.5);

        let y_minus = preimage(&f.psi, -t, "psi^-1(-t)")?;
        let y_plus = preimage(&f.psi, t, "psi^-1(t)")?;
        let k1 = preimage(&f.phi, m_j + lam_j * y_minus, "k1")?;
        let k2 = preimage(&f.phi, m_j + lam_j * y_plus, "k2")?;
        let z_plus = preimage(&f.phi, t, "phi^-1(t)")?;
        let z_minus = preimage(&f.phi, -t, "phi^-1(-t)")?;

        let one_v = IInterval::ONE - v;
        let u_i = (z_plus - v) / one_v;
        let u_j = (z_minus - v) / one_v;
        let u_t = (k2 - v) / one_v;
        let it = -positive_root(u_i, d, "i~")?;
        let jt = -positive_root(u_j, d, "j~")?;
        let tt = positive_root(u_t, d, "t~")?;
        if !k1.certainly_lt(&k2) {
            return Err(RenormError::CombinatoricsBroken("K degenerates".into()));
        }
        // In units of t: J~ inside T, and the new J and T disjoint.
        if !(it.lo() >= -1.0 && it.certainly_lt(&jt) && jt.certainly_lt(&-tt)) {
            return Err(RenormError::CombinatoricsBroken(format!("J~ = [{it:?}, {jt:?}] not inside T or meets T~")));
        }
        let vt = (v.scale(2.0) - k1 - k2) / (k2 - k1);

        let p = p_enclosure(v, d, it, jt, Orientation::Preserving, n)?;
        let p_table = PowerTable::new(&p);
        let phi_p = p_table.compose(&f.phi)?;
        let psi_t = phi_p.scale(-(IInterval::ONE / t));

        let s_k = AffineMap::new(k1, k2, Orientation::Preserving)?;
        let sk_table = PowerTable::new(&s_k.as_enclosure(n));
        let phi_sk = sk_table.compose(&f.phi)?;
        let q = phi_sk.add_constant(-m_j).scale(IInterval::ONE / lam_j);
        let q_table = PowerTable::new(&q);
        let phi_t = q_table.compose(&f.psi)?.scale(IInterval::ONE / t);

        let output = RenormElement { d, v: vt, i: it, j: jt, t: tt, psi: psi_t, phi: phi_t };
        Ok(RenormStep {
            input: f.clone(),
            output,
            y_minus,
            y_plus,
            k1,
            k2,
            z_plus,
            z_minus,
            u_i,
            u_j,
            u_t,
            p,
            p_table,
            phi_p,
            q,
            q_table,
            sk_table,
        })
    })
}
