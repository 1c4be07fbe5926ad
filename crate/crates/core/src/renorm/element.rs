use std::fs;
use std::path::{Path, PathBuf};

use super::{RenormError, TangentVector};
use crate::funcspace::FuncEnclosure;
use crate::rigor::round::add_up;
use crate::rigor::{format_interval, parse_interval, IInterval};

/// A map of class A: `F = s_J^{-1}`-rescaled `psi` on `J = [i, j]` and
/// `phi ∘ p_v(x / t)` on `T = [-t, t]`, with `p_v(x) = v + (1 - v)|x|^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct RenormElement {
    pub d: f64,
    pub v: IInterval,
    pub i: IInterval,
    pub j: IInterval,
    pub t: IInterval,
    pub psi: FuncEnclosure,
    pub phi: FuncEnclosure,
}

impl RenormElement {
    pub fn degree(&self) -> usize {
        self.psi.degree()
    }

    /// Checks `-1 <= i < j < -t < 0 < t < 1`, `v in [-1, 1]`.
    pub fn check(&self) -> Result<(), RenormError> {
        let broken = |what: &str| Err(RenormError::CombinatoricsBroken(what.to_string()));
        if self.psi.degree() != self.phi.degree() {
            return broken("psi and phi degrees differ");
        }
        if !(self.d > 1.0) {
            return broken("critical degree must exceed 1");
        }
        if self.i.lo() < -1.0 || !self.i.certainly_lt(&self.j) {
            return broken("J is not a subinterval of [-1, 1]");
        }
        if !self.t.certainly_positive() || self.t.hi() >= 1.0 {
            return broken("t outside (0, 1)");
        }
        if !self.j.certainly_lt(&-self.t) {
            return broken("J meets T");
        }
        if self.v.lo() < -1.0 || self.v.hi() > 1.0 {
            return broken("v outside [-1, 1]");
        }
        Ok(())
    }

    /// Scaling ratio of the fixed point; identified with `t`.
    pub fn lambda(&self) -> IInterval {
        self.t
    }

    /// `F(0) = phi(v)`.
    pub fn critical_value(&self) -> Result<IInterval, RenormError> {
        Ok(self.phi.eval(self.v)?)
    }

    /// The element with every field replaced by a representable midpoint.
    pub fn midpoint(&self) -> Self {
        let pt = |a: IInterval| IInterval::point(a.midpoint());
        let pf = |f: &FuncEnclosure| FuncEnclosure::from_points(f.degree(), &f.midpoints());
        RenormElement {
            d: self.d,
            v: pt(self.v),
            i: pt(self.i),
            j: pt(self.j),
            t: pt(self.t),
            psi: pf(&self.psi),
            phi: pf(&self.phi),
        }
    }

    /// Box containing the l1 ball of radius `r`: every scalar widened by `r`,
    /// a slot-0 tail `r` on each function.
    pub fn inflated(&self, r: f64) -> Self {
        RenormElement {
            d: self.d,
            v: self.v.inflate(r),
            i: self.i.inflate(r),
            j: self.j.inflate(r),
            t: self.t.inflate(r),
            psi: self.psi.inflated(r),
            phi: self.phi.inflated(r),
        }
    }

    pub fn resized(&self, n: usize) -> Self {
        RenormElement { psi: self.psi.resized(n), phi: self.phi.resized(n), ..self.clone() }
    }

    pub fn add_tangent(&self, h: &TangentVector) -> Self {
        RenormElement {
            d: self.d,
            v: self.v + h.dv,
            i: self.i + h.di,
            j: self.j + h.dj,
            t: self.t + h.dt,
            psi: self.psi.add(&h.dpsi),
            phi: self.phi.add(&h.dphi),
        }
    }

    /// `self - other` as a tangent vector.
    pub fn diff(&self, other: &Self) -> TangentVector {
        TangentVector {
            dv: self.v - other.v,
            di: self.i - other.i,
            dj: self.j - other.j,
            dt: self.t - other.t,
            dpsi: self.psi.sub(&other.psi),
            dphi: self.phi.sub(&other.phi),
        }
    }

    /// `|v| + |i| + |j| + |t| + ||psi|| + ||phi||`, upper bound.
    pub fn norm_l1(&self) -> f64 {
        [self.v.mag(), self.i.mag(), self.j.mag(), self.t.mag(), self.psi.norm_l1(), self.phi.norm_l1()]
            .into_iter()
            .fold(0.0, add_up)
    }

    pub fn data_file_name(d: f64) -> String {
        format!("data_{d}")
    }

    pub fn psi_file_name(d: f64) -> String {
        format!("psi_{d}")
    }

    pub fn phi_file_name(d: f64) -> String {
        format!("phi_{d}")
    }

    /// Writes `data_<d>`, `psi_<d>`, `phi_<d>` into `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<PathBuf, RenormError> {
        fs::create_dir_all(dir)?;
        let psi_name = Self::psi_file_name(self.d);
        let phi_name = Self::phi_file_name(self.d);
        let mut data = String::new();
        for a in [self.v, self.i, self.j, self.t] {
            data.push_str(&format_interval(&a));
            data.push('\n');
        }
        data.push_str(&psi_name);
        data.push('\n');
        data.push_str(&phi_name);
        data.push('\n');
        let path = dir.join(Self::data_file_name(self.d));
        fs::write(&path, data)?;
        fs::write(dir.join(psi_name), self.psi.to_text())?;
        fs::write(dir.join(phi_name), self.phi.to_text())?;
        Ok(path)
    }

    pub fn read_files(dir: &Path, d: f64) -> Result<Self, RenormError> {
        let path = dir.join(Self::data_file_name(d));
        let text = fs::read_to_string(&path)?;
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if lines.len() != 6 {
            return Err(RenormError::Format(format!("{}: expected 6 lines", path.display())));
        }
        let iv = |k: usize| parse_interval(lines[k]).map_err(|e| RenormError::Format(e.to_string()));
        let load = |name: &str| -> Result<FuncEnclosure, RenormError> {
            let text = fs::read_to_string(dir.join(name.trim()))?;
            Ok(FuncEnclosure::from_text(&text)?)
        };
        Ok(RenormElement {
            d,
            v: iv(0)?,
            i: iv(1)?,
            j: iv(2)?,
            t: iv(3)?,
            psi: load(lines[4])?,
            phi: load(lines[5])?,
        })
    }
}
