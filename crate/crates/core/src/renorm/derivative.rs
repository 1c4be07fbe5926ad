use nalgebra::DMatrix;
use rayon::prelude::*;

use super::operator::abs_affine_power;
use super::tangent::block_len;
use super::{RenormError, RenormStep, TangentVector};
use crate::funcspace::{AffineMap, FuncEnclosure, Orientation};
use crate::rigor::{scope_result, IInterval};

/// Cached pieces of `DR` at one element, so that each tangent vector costs
/// two truncated products.
#[derive(Clone, Debug)]
pub struct Linearization<'a> {
    step: &'a RenormStep,
    dpsi_y_minus: IInterval,
    dpsi_y_plus: IInterval,
    dphi_k1: IInterval,
    dphi_k2: IInterval,
    dphi_z_plus: IInterval,
    dphi_z_minus: IInterval,
    /// `phi' ∘ P`.
    phi_prime_p: FuncEnclosure,
    /// `d (1 - v) |s_{J~}|^{d-1}`.
    p_slope: FuncEnclosure,
    /// `(1 - P) / (1 - v)`.
    p_dv: FuncEnclosure,
    /// `psi' ∘ Q`.
    psi_prime_q: FuncEnclosure,
    /// `phi' ∘ s_K / lambda_J`.
    phi_prime_sk: FuncEnclosure,
}

impl<'a> Linearization<'a> {
    pub fn new(step: &'a RenormStep) -> Result<Self, RenormError> {
        scope_result(|| {
            let f = &step.input;
            let g = &step.output;
            let n = f.degree();
            let one_v = IInterval::ONE - f.v;
            let lam_j = (f.j - f.i).scale(0.5);

            let jt_map = AffineMap::new(g.i, g.j, Orientation::Preserving)?;
            let e = abs_affine_power(jt_map.center(), jt_map.half_width(), f.d - 1.0, n)?;
            let p_slope = e.scale(one_v * f.d);
            let p_dv = step.p.neg().add_constant(IInterval::ONE).scale(IInterval::ONE / one_v);

            Ok(Linearization {
                step,
                dpsi_y_minus: f.psi.eval_derivative(step.y_minus)?,
                dpsi_y_plus: f.psi.eval_derivative(step.y_plus)?,
                dphi_k1: f.phi.eval_derivative(step.k1)?,
                dphi_k2: f.phi.eval_derivative(step.k2)?,
                dphi_z_plus: f.phi.eval_derivative(step.z_plus)?,
                dphi_z_minus: f.phi.eval_derivative(step.z_minus)?,
                phi_prime_p: step.p_table.compose_deriv(&f.phi, 1)?,
                p_slope,
                p_dv,
                psi_prime_q: step.q_table.compose_deriv(&f.psi, 1)?,
                phi_prime_sk: step.sk_table.compose_deriv(&f.phi, 1)?.scale(IInterval::ONE / lam_j),
            })
        })
    }

    pub fn step(&self) -> &RenormStep {
        self.step
    }

    /// `DR(F) h`.
    pub fn apply(&self, h: &TangentVector) -> Result<TangentVector, RenormError> {
        scope_result(|| self.apply_inner(h))
    }

    fn apply_inner(&self, h: &TangentVector) -> Result<TangentVector, RenormError> {
        let s = self.step;
        let f = &s.input;
        let g = &s.output;
        let n = f.degree();
        let (v, i, j, t, d) = (f.v, f.i, f.j, f.t, f.d);
        let (dv, di, dj, dt) = (h.dv, h.di, h.dj, h.dt);
        let one = IInterval::ONE;
        let one_v = one - v;
        let lam_j = (j - i).scale(0.5);
        let half = |a: IInterval| a.scale(0.5);

        // Inverse points.
        let dy_minus = (-dt - h.dpsi.eval(s.y_minus)?) / self.dpsi_y_minus;
        let dy_plus = (dt - h.dpsi.eval(s.y_plus)?) / self.dpsi_y_plus;
        let dw = |y: IInterval, dy: IInterval| half(dj - di) * y + half(di + dj) + lam_j * dy;
        let dk1 = (dw(s.y_minus, dy_minus) - h.dphi.eval(s.k1)?) / self.dphi_k1;
        let dk2 = (dw(s.y_plus, dy_plus) - h.dphi.eval(s.k2)?) / self.dphi_k2;
        let dz_plus = (dt - h.dphi.eval(s.z_plus)?) / self.dphi_z_plus;
        let dz_minus = (-dt - h.dphi.eval(s.z_minus)?) / self.dphi_z_minus;

        // Scalars: x~ = +-u^{1/d} gives dx~ = x~ du / (d u).
        let du = |dz: IInterval, z: IInterval| (dz * one_v + dv * (z - one)) / one_v.sqr();
        let droot = |x: IInterval, du: IInterval, u: IInterval| {
            if du.is_zero() {
                IInterval::ZERO
            } else {
                x * du / (u * d)
            }
        };
        let d_it = droot(g.i, du(dz_plus, s.z_plus), s.u_i);
        let d_jt = droot(g.j, du(dz_minus, s.z_minus), s.u_j);
        let d_tt = droot(g.t, du(dk2, s.k2), s.u_t);
        let dk = s.k2 - s.k1;
        let d_vt = ((dv.scale(2.0) - dk1 - dk2) * dk - (v.scale(2.0) - s.k1 - s.k2) * (dk2 - dk1)) / dk.sqr();

        // psi~ = -(1/t) phi ∘ P.
        let mut dp = FuncEnclosure::zero(n);
        dp.add_scaled(dv, &self.p_dv);
        if !(d_it.is_zero() && d_jt.is_zero()) {
            let mut ds = FuncEnclosure::zero(n);
            ds.set_coeff(0, half(d_it + d_jt));
            if n >= 1 {
                ds.set_coeff(1, half(d_jt - d_it));
            } else {
                ds.add_tail(0, half(d_jt - d_it).mag());
            }
            dp = dp.sub(&self.p_slope.mul(&ds));
        }
        let mut inner = s.p_table.compose(&h.dphi)?;
        if !dp.is_zero() {
            inner = inner.add(&self.phi_prime_p.mul(&dp));
        }
        let mut dpsi_t = inner.scale(-(one / t));
        dpsi_t.add_scaled(dt / t.sqr(), &s.phi_p);

        // phi~ = (1/t) psi ∘ Q.
        let mut dq = s.sk_table.compose(&h.dphi)?.scale(one / lam_j);
        if !(dk1.is_zero() && dk2.is_zero()) {
            let mut ds = FuncEnclosure::zero(n);
            ds.set_coeff(0, half(dk1 + dk2));
            if n >= 1 {
                ds.set_coeff(1, half(dk2 - dk1));
            } else {
                ds.add_tail(0, half(dk2 - dk1).mag());
            }
            dq = dq.add(&self.phi_prime_sk.mul(&ds));
        }
        let jw = j - i;
        dq = dq.add_constant(-((di + dj) / jw));
        dq.add_scaled(-((dj - di) / jw), &s.q);
        let mut inner = s.q_table.compose(&h.dpsi)?;
        if !dq.is_zero() {
            inner = inner.add(&self.psi_prime_q.mul(&dq));
        }
        let mut dphi_t = inner.scale(one / t);
        dphi_t.add_scaled(-(dt / t), &g.phi);

        Ok(TangentVector { dv: d_vt, di: d_it, dj: d_jt, dt: d_tt, dpsi: dpsi_t, dphi: dphi_t })
    }
}

/// `DR(F) h` for a single vector.
pub fn apply_derivative(step: &RenormStep, h: &TangentVector) -> Result<TangentVector, RenormError> {
    Linearization::new(step)?.apply(h)
}

/// Images of the block basis with cut `k`, plus the images of the unit
/// tail balls beyond `k` in the psi and phi directions.
#[derive(Clone, Debug)]
pub struct DerivativeMatrix {
    pub cut: usize,
    pub columns: Vec<TangentVector>,
    pub psi_tail: TangentVector,
    pub phi_tail: TangentVector,
}

impl DerivativeMatrix {
    pub fn block_len(&self) -> usize {
        block_len(self.cut)
    }

    /// Midpoints of the finite block, as a matrix acting on block coordinates.
    pub fn mid_block(&self) -> DMatrix<f64> {
        mid_block(&self.columns, self.cut)
    }
}

/// Images of the block basis with cut `k <= N`, computed in parallel.
pub fn derivative_columns(step: &RenormStep, k: usize) -> Result<Vec<TangentVector>, RenormError> {
    let n = step.input.degree();
    let lin = Linearization::new(step)?;
    (0..block_len(k.min(n)))
        .into_par_iter()
        .map(|b| lin.apply(&TangentVector::basis(n, k.min(n), b)))
        .collect()
}

/// Derivative at `step.input` on the block basis with cut `k <= N`, with
/// the tail-ball columns.
pub fn derivative_matrix(step: &RenormStep, k: usize) -> Result<DerivativeMatrix, RenormError> {
    let n = step.input.degree();
    let k = k.min(n);
    let columns = derivative_columns(step, k)?;
    let lin = Linearization::new(step)?;
    let psi_tail = lin.apply(&TangentVector::psi_tail(n, k))?;
    let phi_tail = lin.apply(&TangentVector::phi_tail(n, k))?;
    Ok(DerivativeMatrix { cut: k, columns, psi_tail, phi_tail })
}

/// Midpoint matrix of a set of block columns.
pub fn mid_block(columns: &[TangentVector], k: usize) -> DMatrix<f64> {
    let m = block_len(k);
    let mut a = DMatrix::zeros(m, m);
    for (b, col) in columns.iter().enumerate() {
        for (r, x) in col.block(k).iter().enumerate() {
            a[(r, b)] = x.midpoint();
        }
    }
    a
}
