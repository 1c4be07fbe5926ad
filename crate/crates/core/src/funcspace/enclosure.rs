use std::fmt::Write as _;

use super::FuncError;
use crate::rigor::round::{add_up, mul_up};
use crate::rigor::{format_hex, parse_hex, parse_interval, IInterval};

/// Degree-`N` polynomial with interval coefficients and per-order tails.
///
/// Slot `k` stands for `a_k x^k + g_k(x)` with `a_k` in `coeff(k)` and `g_k`
/// any analytic function vanishing to order `k` at the origin whose
/// coefficient-l1 norm is at most `tail(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuncEnclosure {
    coeffs: Vec<IInterval>,
    tails: Vec<f64>,
}

impl FuncEnclosure {
    pub fn zero(n: usize) -> Self {
        FuncEnclosure { coeffs: vec![IInterval::ZERO; n + 1], tails: vec![0.0; n + 1] }
    }

    pub fn constant(n: usize, c: IInterval) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[0] = c;
        f
    }

    pub fn monomial(n: usize, k: usize) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[k] = IInterval::ONE;
        f
    }

    pub fn identity(n: usize) -> Self {
        Self::monomial(n, 1)
    }

    /// Point polynomial `sum c[k] x^k`; `c` is padded or cut to degree `n`,
    /// the cut part moving into the top tail.
    pub fn from_points(n: usize, c: &[f64]) -> Self {
        let coeffs: Vec<IInterval> = c.iter().map(|&x| IInterval::point(x)).collect();
        let tails = vec![0.0; coeffs.len()];
        FuncEnclosure { coeffs, tails }.resized(n)
    }

    pub fn from_parts(coeffs: Vec<IInterval>, tails: Vec<f64>) -> Result<Self, FuncError> {
        if coeffs.is_empty() || coeffs.len() != tails.len() {
            return Err(FuncError::Format("coefficient and tail counts differ".into()));
        }
        if tails.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
            return Err(FuncError::Format("tails must be finite and nonnegative".into()));
        }
        Ok(FuncEnclosure { coeffs, tails })
    }

    /// Unit ball of functions vanishing to order `k`: zero coefficients and
    /// `tail(k) = 1`.
    pub fn unit_tail(n: usize, k: usize) -> Self {
        let mut f = Self::zero(n);
        f.tails[k.min(n)] = 1.0;
        f
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeff(&self, k: usize) -> IInterval {
        self.coeffs[k]
    }

    #[inline]
    pub fn tail(&self, k: usize) -> f64 {
        self.tails[k]
    }

    pub fn coeffs(&self) -> &[IInterval] {
        &self.coeffs
    }

    pub fn tails(&self) -> &[f64] {
        &self.tails
    }

    pub fn set_coeff(&mut self, k: usize, c: IInterval) {
        self.coeffs[k] = c;
    }

    pub fn add_tail(&mut self, k: usize, r: f64) {
        debug_assert!(r >= 0.0);
        self.tails[k] = add_up(self.tails[k], r);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero()) && self.tails.iter().all(|&r| r == 0.0)
    }

    pub fn has_tails(&self) -> bool {
        self.tails.iter().any(|&r| r > 0.0)
    }

    /// Highest index with a nonzero coefficient (0 for the zero polynomial).
    pub fn effective_degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.midpoint()).collect()
    }

    /// Upper bound of the coefficient-l1 norm of the polynomial part.
    pub fn poly_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |s, c| add_up(s, c.mag()))
    }

    pub fn tail_sum(&self) -> f64 {
        self.tails.iter().fold(0.0, |s, &r| add_up(s, r))
    }

    /// Upper bound of the l1 norm of every member.
    pub fn norm_l1(&self) -> f64 {
        add_up(self.poly_norm(), self.tail_sum())
    }

    /// Largest coefficient width plus tails; a measure of how loose the
    /// enclosure is.
    pub fn radius(&self) -> f64 {
        let w = self.coeffs.iter().fold(0.0, |s, c| add_up(s, c.width()));
        add_up(w, self.tail_sum())
    }

    /// Returns the same set described at degree `n`. Coefficients above `n`
    /// become tail mass at slot `n`.
    pub fn resized(&self, n: usize) -> Self {
        let m = self.degree();
        if n >= m {
            let mut f = self.clone();
            f.coeffs.resize(n + 1, IInterval::ZERO);
            f.tails.resize(n + 1, 0.0);
            return f;
        }
        let mut f = FuncEnclosure { coeffs: self.coeffs[..=n].to_vec(), tails: self.tails[..=n].to_vec() };
        let spill = (n + 1..=m).fold(0.0, |s, k| add_up(add_up(s, self.coeffs[k].mag()), self.tails[k]));
        f.tails[n] = add_up(f.tails[n], spill);
        f
    }

    /// Same set with everything above degree `m` folded into the slot-`m`
    /// tail; cheap to evaluate.
    pub fn truncated_for_eval(&self, m: usize) -> Self {
        let n = self.degree();
        if m >= n {
            return self.clone();
        }
        let mut f = FuncEnclosure { coeffs: self.coeffs[..=m].to_vec(), tails: self.tails[..=m].to_vec() };
        let spill = (m + 1..=n).fold(0.0, |s, k| add_up(add_up(s, self.coeffs[k].mag()), self.tails[k]));
        f.tails[m] = add_up(f.tails[m], spill);
        f
    }

    /// Adds `r` to the slot-0 tail: the l1 ball of radius `r` around `self`.
    pub fn inflated(&self, r: f64) -> Self {
        let mut f = self.clone();
        f.add_tail(0, r);
        f
    }

    fn check_domain(x: &IInterval) -> Result<(), FuncError> {
        if x.lo() < -1.0 || x.hi() > 1.0 {
            Err(FuncError::DomainViolation(*x))
        } else {
            Ok(())
        }
    }

    pub fn eval(&self, x: IInterval) -> Result<IInterval, FuncError> {
        Self::check_domain(&x)?;
        let n = self.effective_degree();
        let mut acc = self.coeffs[n];
        for k in (0..n).rev() {
            acc = acc * x + self.coeffs[k];
        }
        if self.has_tails() {
            let q = x.mag();
            let mut pow = 1.0;
            let mut t = 0.0;
            for &r in &self.tails {
                if r > 0.0 {
                    t = add_up(t, mul_up(r, pow));
                }
                pow = mul_up(pow, q);
            }
            acc = acc.inflate(t);
        }
        Ok(acc)
    }

    pub fn eval_derivative(&self, x: IInterval) -> Result<IInterval, FuncError> {
        self.eval_deriv(x, 1)
    }

    /// Encloses the `order`-th derivative at `x`. Tails are bounded by
    /// [`tail_derivative_factor`].
    pub fn eval_deriv(&self, x: IInterval, order: u32) -> Result<IInterval, FuncError> {
        Self::check_domain(&x)?;
        let o = order as usize;
        let n = self.degree();
        let mut acc = IInterval::ZERO;
        let top = self.effective_degree();
        if top >= o {
            for k in (o..=top).rev() {
                acc = acc * x + self.coeffs[k] * falling(k, o);
            }
        }
        if self.has_tails() {
            let q = x.mag();
            let mut t = 0.0;
            for (k, &r) in self.tails.iter().enumerate() {
                if r > 0.0 {
                    t = add_up(t, mul_up(r, tail_derivative_factor(k, order, q, n)));
                }
            }
            acc = acc.inflate(t);
        }
        Ok(acc)
    }

    pub fn neg(&self) -> Self {
        FuncEnclosure { coeffs: self.coeffs.iter().map(|&c| -c).collect(), tails: self.tails.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.degree().max(o.degree());
        let (a, b) = (self.resized(n), o.resized(n));
        FuncEnclosure {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| x + y).collect(),
            tails: a.tails.iter().zip(&b.tails).map(|(&x, &y)| add_up(x, y)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: IInterval) -> Self {
        let m = s.mag();
        FuncEnclosure {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
            tails: self.tails.iter().map(|&r| mul_up(r, m)).collect(),
        }
    }

    pub fn add_constant(&self, c: IInterval) -> Self {
        let mut f = self.clone();
        f.coeffs[0] += c;
        f
    }

    /// `self + s * o`, sharing a pass over the coefficients.
    pub fn add_scaled(&mut self, s: IInterval, o: &Self) {
        debug_assert_eq!(self.degree(), o.degree());
        if s.is_zero() {
            return;
        }
        let m = s.mag();
        for (k, c) in o.coeffs.iter().enumerate() {
            if !c.is_zero() {
                self.coeffs[k] += *c * s;
            }
        }
        for (k, &r) in o.tails.iter().enumerate() {
            if r > 0.0 {
                self.tails[k] = add_up(self.tails[k], mul_up(r, m));
            }
        }
    }

    /// Truncated product; degree-overflow mass goes to the top tail.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.degree().max(o.degree());
        let a = self.resized(n);
        let b = o.resized(n);
        let da = a.effective_degree();
        let db = b.effective_degree();
        let mut out = FuncEnclosure::zero(n);
        for (i, ai) in a.coeffs[..=da].iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let jmax = db.min(n - i);
            for (j, bj) in b.coeffs[..=jmax].iter().enumerate() {
                out.coeffs[i + j] += *ai * *bj;
            }
        }
        if da + db > n {
            // suffix[l] = sum_{l' >= l} |b_l'|
            let mut suffix = vec![0.0; db + 2];
            for l in (0..=db).rev() {
                suffix[l] = add_up(suffix[l + 1], b.coeffs[l].mag());
            }
            let mut spill = 0.0;
            for i in 0..=da {
                let lmin = n + 1 - i;
                if lmin <= db {
                    spill = add_up(spill, mul_up(a.coeffs[i].mag(), suffix[lmin]));
                }
            }
            out.tails[n] = add_up(out.tails[n], spill);
        }
        if a.has_tails() {
            let nb = b.norm_l1();
            for k in 0..=n {
                if a.tails[k] > 0.0 {
                    out.tails[k] = add_up(out.tails[k], mul_up(a.tails[k], nb));
                }
            }
        }
        if b.has_tails() {
            let pa = a.poly_norm();
            for k in 0..=n {
                if b.tails[k] > 0.0 {
                    out.tails[k] = add_up(out.tails[k], mul_up(b.tails[k], pa));
                }
            }
        }
        out
    }

    /// `self ∘ inner` by Horner's scheme. Tails of `self` require
    /// `||inner||_1 <= 1`, which also puts the range of `inner` in `[-1, 1]`.
    pub fn compose(&self, inner: &Self) -> Result<Self, FuncError> {
        let n = self.degree().max(inner.degree());
        let q = inner.norm_l1();
        check_inner(self, q)?;
        let top = self.effective_degree();
        let mut acc = FuncEnclosure::constant(n, self.coeffs[top]);
        for k in (0..top).rev() {
            acc = acc.mul(inner);
            acc.coeffs[0] += self.coeffs[k];
        }
        if self.has_tails() {
            let mut pow = 1.0;
            let mut t = 0.0;
            for &r in &self.tails {
                if r > 0.0 {
                    t = add_up(t, mul_up(r, pow));
                }
                pow = mul_up(pow, q);
            }
            acc.add_tail(0, t);
        }
        Ok(acc)
    }

    /// Derivative under the Markov-type convention: a slot-`k` tail `r`
    /// yields a slot-`(k-1)` tail `N r`.
    pub fn derivative_enclosure(&self) -> Self {
        let n = self.degree();
        let mut out = FuncEnclosure::zero(n);
        for k in 1..=n {
            out.coeffs[k - 1] = self.coeffs[k] * (k as f64);
        }
        for k in 0..=n {
            if self.tails[k] > 0.0 {
                out.add_tail(k.saturating_sub(1), mul_up(self.tails[k], n as f64));
            }
        }
        out
    }

    /// Slotwise containment of the polynomial part; tails of `self` may
    /// absorb differences.
    pub fn contains_point_poly(&self, p: &[f64]) -> bool {
        let mut excess = 0.0;
        for k in 0..self.coeffs.len().max(p.len()) {
            let c = self.coeffs.get(k).copied().unwrap_or(IInterval::ZERO);
            let x = p.get(k).copied().unwrap_or(0.0);
            if !c.contains(x) {
                let d = if x < c.lo() { c.lo() - x } else { x - c.hi() };
                excess = add_up(excess, d);
            }
        }
        excess <= self.tail_sum()
    }

    /// Every slot of `self` contains the corresponding slot of `o`.
    pub fn contains(&self, o: &Self) -> bool {
        self.degree() == o.degree()
            && self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a.contains_interval(b))
            && self.tails.iter().zip(&o.tails).all(|(a, b)| a >= b)
    }

    /// Text format: `N`, then `N+1` lines `lo hi tail` in hex floats.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.degree());
        for (c, &r) in self.coeffs.iter().zip(&self.tails) {
            let _ = writeln!(s, "{} {} {}", format_hex(c.lo()), format_hex(c.hi()), format_hex(r));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, FuncError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| FuncError::Format("empty file".into()))?
            .trim()
            .parse()
            .map_err(|_| FuncError::Format("bad degree line".into()))?;
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut tails = Vec::with_capacity(n + 1);
        for line in lines.by_ref().take(n + 1) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(FuncError::Format(format!("bad slot line {line:?}")));
            }
            coeffs.push(parse_interval(&format!("{} {}", parts[0], parts[1]))?);
            tails.push(parse_hex(parts[2])?);
        }
        if coeffs.len() != n + 1 || lines.next().is_some() {
            return Err(FuncError::Format(format!("expected {} slot lines", n + 1)));
        }
        Self::from_parts(coeffs, tails)
    }
}

fn check_inner(outer: &FuncEnclosure, q: f64) -> Result<(), FuncError> {
    // A pure polynomial composes algebraically; tails need ||inner||_1 <= 1.
    if q <= 1.0 || !outer.has_tails() {
        Ok(())
    } else {
        Err(FuncError::RangeViolation(q))
    }
}

#[inline]
pub(crate) fn falling(k: usize, o: usize) -> f64 {
    (0..o).fold(1.0, |p, i| p * (k - i) as f64)
}

/// Upper bound of `sup_{m >= k} m (m-1) ... (m-o+1) q^(m-o)`, the factor by
/// which the `o`-th derivative of a slot-`k` tail can grow at `|x| <= q`.
///
/// For `q >= 1` the sup is infinite and the Markov-type convention
/// `N^o` of this crate is used instead.
pub fn tail_derivative_factor(k: usize, order: u32, q: f64, n: usize) -> f64 {
    let o = order as usize;
    if o == 0 {
        return if q >= 1.0 { 1.0 } else { IInterval::point(q).powi(k as u32).hi() };
    }
    if q >= 1.0 {
        return IInterval::point(n as f64).powi(order).hi();
    }
    let m0 = k.max(o);
    // Terms increase while (m+1) q > m+1-o.
    let turn = (o as f64 / (1.0 - q)).ceil();
    let mstar = if turn > m0 as f64 + 1.0 { turn as usize - 1 } else { m0 };
    if mstar > 4_000_000 {
        // m^o e^{-mL} <= (o / (e L))^o with L = -ln q.
        let l = -crate::rigor::ln(IInterval::point(q)).map(|v| v.hi()).unwrap_or(0.0);
        if l <= 0.0 {
            return f64::MAX;
        }
        let el = crate::rigor::round::mul_down(std::f64::consts::E.next_down(), l);
        let base = crate::rigor::round::div_up(o as f64, el);
        let lead = IInterval::point(base).powi(order).hi();
        let inv = IInterval::point(q).powi(order).inv().map(|v| v.hi()).unwrap_or(f64::MAX);
        return mul_up(lead, inv);
    }
    let mut best = 0.0f64;
    // Check a small window around the analytic peak to absorb rounding.
    let lo = mstar.saturating_sub(2).max(m0);
    for m in lo..=mstar + 2 {
        let v = mul_up(falling_up(m, o), IInterval::point(q).powi((m - o) as u32).hi());
        best = best.max(v);
    }
    best
}

fn falling_up(k: usize, o: usize) -> f64 {
    (0..o).fold(1.0, |p, i| mul_up(p, (k - i) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let id = FuncEnclosure::identity(5);
        assert!(id.eval(IInterval::point(0.5)).unwrap().contains(0.5));
        let mut f = FuncEnclosure::constant(0, IInterval::point(2.0));
        f.add_tail(0, 0.1);
        let r = f.eval(IInterval::ZERO).unwrap();
        assert!(r.lo() <= 1.9 && r.hi() >= 2.1);
        let sq = FuncEnclosure::monomial(4, 2);
        let r = sq.eval(IInterval::UNIT).unwrap();
        for i in 0..=200 {
            let x = -1.0 + i as f64 / 100.0;
            assert!(r.contains(x * x));
        }
        assert!(matches!(id.eval(IInterval::new(0.5, 1.5).unwrap()), Err(FuncError::DomainViolation(_))));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(FuncEnclosure::zero(3).norm_l1(), 0.0);
        assert_eq!(FuncEnclosure::constant(0, IInterval::ONE).norm_l1(), 1.0);
        assert_eq!(FuncEnclosure::identity(7).norm_l1(), 1.0);
    }

    #[test]
    fn compose_examples() {
        let f = FuncEnclosure::from_points(6, &[0.1, -0.3, 0.2, 0.05]);
        let id = FuncEnclosure::identity(6);
        assert!(f.compose(&id).unwrap().contains(&f));
        assert!(id.compose(&f).unwrap().contains(&f));
        let sq = FuncEnclosure::monomial(4, 2);
        let shift = FuncEnclosure::from_points(4, &[0.25, 1.0]);
        let r = sq.compose(&shift).unwrap();
        assert!(r.contains_point_poly(&[0.0625, 0.5, 1.0]));
    }

    #[test]
    fn mul_spills_into_top_tail() {
        let a = FuncEnclosure::from_points(3, &[0.0, 0.0, 1.0]);
        let p = a.mul(&a);
        assert!(p.coeffs[..].iter().all(|c| c.is_zero()));
        assert_eq!(p.tail(3), 1.0);
    }

    #[test]
    fn derivative_examples() {
        let c = FuncEnclosure::constant(4, IInterval::point(3.0));
        assert!(c.derivative_enclosure().is_zero());
        let cube = FuncEnclosure::monomial(5, 3);
        let d = cube.derivative_enclosure();
        assert!(d.eval(IInterval::ONE).unwrap().contains(3.0));
        let f = FuncEnclosure::from_points(8, &[0.3, -0.2, 0.5, 0.1, -0.05, 0.02]);
        let df = f.derivative_enclosure();
        let h = 1e-6;
        for i in 0..20 {
            let x = -0.95 + 0.1 * i as f64;
            let ev = |y: f64| f.eval(IInterval::point(y)).unwrap().midpoint();
            let fd = (ev(x + h) - ev(x - h)) / (2.0 * h);
            let exact = df.eval(IInterval::point(x)).unwrap();
            assert!((fd - exact.midpoint()).abs() <= 1e-5 * exact.mag().max(1.0));
            assert!(f.eval_derivative(IInterval::point(x)).unwrap().contains(exact.midpoint()));
        }
    }

    #[test]
    fn tail_factor_matches_brute_force() {
        for &(k, o, q) in &[(3usize, 1u32, 0.5f64), (0, 1, 0.9), (10, 2, 0.8), (1, 3, 0.95), (40, 1, 0.99)] {
            let mut best: f64 = 0.0;
            for m in k.max(o as usize)..5000 {
                best = best.max(falling(m, o as usize) * q.powi((m - o as usize) as i32));
            }
            let f = tail_derivative_factor(k, o, q, 10);
            assert!(f >= best && f <= best * (1.0 + 1e-12), "{k} {o} {q}: {f} vs {best}");
        }
        assert_eq!(tail_derivative_factor(0, 2, 1.0, 10), 100.0);
    }

    #[test]
    fn text_round_trip() {
        let mut f = FuncEnclosure::from_points(3, &[0.1, -1.0 / 3.0, 0.0, 2e-17]);
        f.add_tail(2, 1e-13);
        let g = FuncEnclosure::from_text(&f.to_text()).unwrap();
        assert_eq!(f, g);
        assert!(FuncEnclosure::from_text("2\n0x1p+0 0x1p+0 0x0p+0\n").is_err());
    }

    #[test]
    fn resize_preserves_membership() {
        let f = FuncEnclosure::from_points(6, &[0.5, 0.25, 0.125, 0.0625, 0.03125]);
        let g = f.resized(2);
        assert_eq!(g.tail(2), 0.0625 + 0.03125);
        let x = IInterval::point(0.7);
        let exact: f64 = [0.5f64, 0.25, 0.125, 0.0625, 0.03125].iter().enumerate().map(|(k, c)| c * 0.7f64.powi(k as i32)).sum();
        assert!(g.eval(x).unwrap().contains(exact));
    }
}
