use crate::funcspace::FuncEnclosure;
use crate::rigor::round::add_up;
use crate::rigor::IInterval;

/// Perturbation `(dv, di, dj, dt; dpsi, dphi)` of a [`super::RenormElement`].
///
/// The finite basis cut at `K` is ordered `h1..h4` (v, i, j, t), then
/// `eta_0..eta_K` (monomials in psi), then `phi_0..phi_K` (monomials in phi).
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub dv: IInterval,
    pub di: IInterval,
    pub dj: IInterval,
    pub dt: IInterval,
    pub dpsi: FuncEnclosure,
    pub dphi: FuncEnclosure,
}

/// Number of finite basis vectors for a cut at `k`.
pub fn block_len(k: usize) -> usize {
    2 * k + 6
}

impl TangentVector {
    pub fn zero(n: usize) -> Self {
        TangentVector {
            dv: IInterval::ZERO,
            di: IInterval::ZERO,
            dj: IInterval::ZERO,
            dt: IInterval::ZERO,
            dpsi: FuncEnclosure::zero(n),
            dphi: FuncEnclosure::zero(n),
        }
    }

    pub fn degree(&self) -> usize {
        self.dpsi.degree()
    }

    /// Basis vector `b` of the block with cut `k`, at degree `n`.
    pub fn basis(n: usize, k: usize, b: usize) -> Self {
        let mut h = Self::zero(n);
        match b {
            0 => h.dv = IInterval::ONE,
            1 => h.di = IInterval::ONE,
            2 => h.dj = IInterval::ONE,
            3 => h.dt = IInterval::ONE,
            _ if b < 5 + k => h.dpsi = FuncEnclosure::monomial(n, b - 4),
            _ => h.dphi = FuncEnclosure::monomial(n, b - 5 - k),
        }
        h
    }

    /// Unit ball of psi-perturbations vanishing to order `k + 1` (order `n`
    /// when `k = n`, overlapping the last monomial).
    pub fn psi_tail(n: usize, k: usize) -> Self {
        TangentVector { dpsi: FuncEnclosure::unit_tail(n, (k + 1).min(n)), ..Self::zero(n) }
    }

    /// Unit ball of phi-perturbations vanishing to order `k + 1`.
    pub fn phi_tail(n: usize, k: usize) -> Self {
        TangentVector { dphi: FuncEnclosure::unit_tail(n, (k + 1).min(n)), ..Self::zero(n) }
    }

    /// Block coordinates for the cut `k` (coefficients only).
    pub fn block(&self, k: usize) -> Vec<IInterval> {
        let mut out = Vec::with_capacity(block_len(k));
        out.extend([self.dv, self.di, self.dj, self.dt]);
        out.extend((0..=k).map(|m| self.dpsi.coeff(m)));
        out.extend((0..=k).map(|m| self.dphi.coeff(m)));
        out
    }

    /// Vector with the given block coordinates and nothing outside the block.
    pub fn from_block(n: usize, k: usize, c: &[IInterval]) -> Self {
        assert_eq!(c.len(), block_len(k));
        let mut h = Self::zero(n);
        h.dv = c[0];
        h.di = c[1];
        h.dj = c[2];
        h.dt = c[3];
        for m in 0..=k {
            h.dpsi.set_coeff(m, c[4 + m]);
            h.dphi.set_coeff(m, c[5 + k + m]);
        }
        h
    }

    pub fn norm_l1(&self) -> f64 {
        [self.dv.mag(), self.di.mag(), self.dj.mag(), self.dt.mag(), self.dpsi.norm_l1(), self.dphi.norm_l1()]
            .into_iter()
            .fold(0.0, add_up)
    }

    pub fn add(&self, o: &Self) -> Self {
        TangentVector {
            dv: self.dv + o.dv,
            di: self.di + o.di,
            dj: self.dj + o.dj,
            dt: self.dt + o.dt,
            dpsi: self.dpsi.add(&o.dpsi),
            dphi: self.dphi.add(&o.dphi),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-IInterval::ONE))
    }

    pub fn scale(&self, s: IInterval) -> Self {
        TangentVector {
            dv: self.dv * s,
            di: self.di * s,
            dj: self.dj * s,
            dt: self.dt * s,
            dpsi: self.dpsi.scale(s),
            dphi: self.dphi.scale(s),
        }
    }

    /// `self += s * o`.
    pub fn add_scaled(&mut self, s: IInterval, o: &Self) {
        if s.is_zero() {
            return;
        }
        self.dv += o.dv * s;
        self.di += o.di * s;
        self.dj += o.dj * s;
        self.dt += o.dt * s;
        self.dpsi.add_scaled(s, &o.dpsi);
        self.dphi.add_scaled(s, &o.dphi);
    }

    pub fn midpoints(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (
            vec![self.dv.midpoint(), self.di.midpoint(), self.dj.midpoint(), self.dt.midpoint()],
            self.dpsi.midpoints(),
            self.dphi.midpoints(),
        )
    }
}
