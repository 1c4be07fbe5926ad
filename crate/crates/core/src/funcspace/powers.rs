use super::enclosure::{falling, tail_derivative_factor};
use super::{FuncEnclosure, FuncError};
use crate::rigor::round::{add_up, mul_up};

/// Powers `inner^0 ..= inner^N` of an enclosure, for repeated composition
/// `f ∘ inner` at quadratic cost.
#[derive(Clone, Debug)]
pub struct PowerTable {
    powers: Vec<FuncEnclosure>,
    /// `suffix_max[k] >= sup_{m >= k} ||inner^m||` (valid when `norm <= 1`).
    suffix_max: Vec<f64>,
    norm: f64,
}

impl PowerTable {
    pub fn new(inner: &FuncEnclosure) -> Self {
        let n = inner.degree();
        let mut powers = Vec::with_capacity(n + 1);
        powers.push(FuncEnclosure::constant(n, crate::rigor::IInterval::ONE));
        for k in 1..=n {
            let next = powers[k - 1].mul(inner);
            powers.push(next);
        }
        let mut suffix_max = vec![0.0; n + 1];
        let mut best = 0.0f64;
        for k in (0..=n).rev() {
            best = best.max(powers[k].norm_l1());
            suffix_max[k] = best;
        }
        PowerTable { powers, suffix_max, norm: inner.norm_l1() }
    }

    pub fn degree(&self) -> usize {
        self.powers.len() - 1
    }

    /// Upper bound of `||inner||_1`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn power(&self, k: usize) -> &FuncEnclosure {
        &self.powers[k]
    }

    /// Upper bound of `sup_{m >= k} ||inner^m||_1`.
    pub fn sup_norm_from(&self, k: usize) -> Result<f64, FuncError> {
        if self.norm > 1.0 {
            return Err(FuncError::RangeViolation(self.norm));
        }
        Ok(self.suffix_max[k.min(self.degree())])
    }

    /// `f ∘ inner`. A slot-`k` tail `r` of `f` contributes `r sup_{m>=k} ||inner^m||`
    /// to the constant tail of the result.
    pub fn compose(&self, f: &FuncEnclosure) -> Result<FuncEnclosure, FuncError> {
        let n = self.degree();
        let f = if f.degree() == n { f.clone() } else { f.resized(n) };
        let mut out = FuncEnclosure::zero(n);
        for k in 0..=f.effective_degree() {
            out.add_scaled(f.coeff(k), &self.powers[k]);
        }
        if f.has_tails() {
            let mut t = 0.0;
            for k in 0..=n {
                let r = f.tail(k);
                if r > 0.0 {
                    t = add_up(t, mul_up(r, self.sup_norm_from(k)?));
                }
            }
            out.add_tail(0, t);
        }
        Ok(out)
    }

    /// `f^(order) ∘ inner`. Tail derivatives are bounded with
    /// [`tail_derivative_factor`] at `q = ||inner||_1`.
    pub fn compose_deriv(&self, f: &FuncEnclosure, order: u32) -> Result<FuncEnclosure, FuncError> {
        let n = self.degree();
        let o = order as usize;
        let f = if f.degree() == n { f.clone() } else { f.resized(n) };
        let mut out = FuncEnclosure::zero(n);
        for k in o..=f.effective_degree().max(o).min(n) {
            let c = f.coeff(k) * falling(k, o);
            out.add_scaled(c, &self.powers[k - o]);
        }
        if f.has_tails() {
            if self.norm > 1.0 {
                return Err(FuncError::RangeViolation(self.norm));
            }
            let mut t = 0.0;
            for k in 0..=n {
                let r = f.tail(k);
                if r > 0.0 {
                    t = add_up(t, mul_up(r, tail_derivative_factor(k, order, self.norm, n)));
                }
            }
            out.add_tail(0, t);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::IInterval;

    #[test]
    fn table_compose_matches_horner() {
        let f = FuncEnclosure::from_points(20, &[0.1, 0.9, -0.2, 0.05, 0.01, -0.003]);
        let g = FuncEnclosure::from_points(20, &[-0.2, 0.5, 0.1, -0.05]);
        let a = PowerTable::new(&g).compose(&f).unwrap();
        let b = f.compose(&g).unwrap();
        for i in 0..=40 {
            let x = IInterval::point(-1.0 + i as f64 / 20.0);
            let (ya, yb) = (a.eval(x).unwrap(), b.eval(x).unwrap());
            assert!(ya.intersect(&yb).is_some());
            assert!(ya.width() < 1e-12);
        }
    }

    #[test]
    fn derivative_composition_contains_chain_rule() {
        let f = FuncEnclosure::from_points(10, &[0.0, 1.0, 0.3, -0.1]).inflated(1e-9);
        let g = FuncEnclosure::from_points(10, &[0.1, 0.4, 0.2]);
        let t = PowerTable::new(&g);
        let dfg = t.compose_deriv(&f, 1).unwrap();
        for i in 0..=10 {
            let x = -1.0 + i as f64 / 5.0;
            let gx = 0.1 + 0.4 * x + 0.2 * x * x;
            let exact = 1.0 + 0.6 * gx - 0.3 * gx * gx;
            assert!(dfg.eval(IInterval::point(x)).unwrap().contains(exact));
        }
    }

    #[test]
    fn tails_need_contracting_inner() {
        let f = FuncEnclosure::identity(4).inflated(1e-3);
        let g = FuncEnclosure::from_points(4, &[0.0, 0.9, 0.3]);
        assert!(matches!(PowerTable::new(&g).compose(&f), Err(FuncError::RangeViolation(_))));
    }
}
