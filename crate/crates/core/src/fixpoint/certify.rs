use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::FixpointError;
use crate::renorm::{block_len, derivative_matrix, renormalize, DerivativeMatrix, RenormElement, TangentVector};
use crate::rigor::round::{add_up, div_up, mul_down, mul_up, sub_down};
use crate::rigor::{scope, IInterval};

/// Approximate fixed point `Z0` with the preconditioner `M ≈ (I - Da)^{-1}`
/// on the finite block; `M` acts as the identity on the tail.
#[derive(Clone, Debug)]
pub struct NewtonState {
    pub z0: RenormElement,
    pub da: DerivativeMatrix,
    pub m: DMatrix<f64>,
    /// Upper bound of the l1 operator norm of `M` on the block.
    pub m_norm: f64,
    /// `||M (I - Da) - I||_1`, a floating-point diagnostic.
    pub defect: f64,
}

fn l1_norm_up(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols()).map(|c| a.column(c).iter().fold(0.0, |s, x| add_up(s, x.abs()))).fold(0.0, f64::max)
}

impl NewtonState {
    pub fn new(z0: &RenormElement, basis: usize) -> Result<Self, FixpointError> {
        let z0 = z0.midpoint();
        let step = renormalize(&z0)?;
        let da = derivative_matrix(&step, basis)?;
        let a = da.mid_block();
        let m_len = a.nrows();
        let id = DMatrix::<f64>::identity(m_len, m_len);
        let i_minus_a = &id - &a;
        let m = i_minus_a.clone().try_inverse().ok_or(FixpointError::Singular)?;
        let defect = l1_norm_up(&(&m * &i_minus_a - &id));
        let m_norm = l1_norm_up(&m);
        Ok(NewtonState { z0, da, m, m_norm, defect })
    }

    pub fn basis(&self) -> usize {
        self.da.cut
    }

    pub fn degree(&self) -> usize {
        self.z0.degree()
    }

    /// `M z`: `M` on the block coordinates, identity elsewhere.
    pub fn apply_m(&self, z: &TangentVector) -> TangentVector {
        let k = self.basis();
        let n = self.degree();
        let c = z.block(k);
        let mc: Vec<IInterval> = (0..c.len())
            .map(|r| {
                c.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .fold(IInterval::ZERO, |s, (b, x)| s + *x * self.m[(r, b)])
            })
            .collect();
        let outside = z.sub(&TangentVector::from_block(n, k, &c));
        TangentVector::from_block(n, k, &mc).add(&outside)
    }
}

/// `N[z] = z + R[Z0 + M z] - (Z0 + M z)`.
pub fn newton_operator(state: &NewtonState, z: &TangentVector) -> Result<TangentVector, FixpointError> {
    let zw = state.z0.add_tangent(&state.apply_m(z));
    let r = renormalize(&zw)?;
    Ok(z.add(&r.output.diff(&zw)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionCertificate {
    pub epsilon: f64,
    pub d_bound: f64,
    pub delta: f64,
    pub valid: bool,
    /// Largest `||DN e_b||` over the finite block.
    pub block_bound: f64,
    /// Largest `||DN||` over the unit tail balls (psi and phi directions).
    pub tail_bound: f64,
    pub m_norm: f64,
    pub defect: f64,
    pub truncation: usize,
    pub basis: usize,
    /// l1 distance from `Z0` within which the fixed point lies (infinite if invalid).
    pub radius: f64,
}

impl ContractionCertificate {
    /// Enclosure of the certified fixed point.
    pub fn enclosure(&self, z0: &RenormElement) -> Option<RenormElement> {
        self.valid.then(|| z0.inflated(self.radius))
    }
}

impl fmt::Display for ContractionCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{{")?;
        writeln!(f, "  \"epsilon\": {:e},", self.epsilon)?;
        writeln!(f, "  \"Dbound\": {:e},", self.d_bound)?;
        writeln!(f, "  \"delta\": {:e},", self.delta)?;
        writeln!(f, "  \"valid\": {},", self.valid)?;
        writeln!(f, "  \"block_bound\": {:e},", self.block_bound)?;
        writeln!(f, "  \"tail_bound\": {:e},", self.tail_bound)?;
        writeln!(f, "  \"M_norm\": {:e},", self.m_norm)?;
        writeln!(f, "  \"defect\": {:e},", self.defect)?;
        writeln!(f, "  \"truncation\": {},", self.truncation)?;
        writeln!(f, "  \"basis\": {},", self.basis)?;
        writeln!(f, "  \"radius\": {:e}", self.radius)?;
        write!(f, "}}")
    }
}

/// Bounds `eps = ||N[0]||` and `D = sup ||DN||` over the ball of radius
/// `delta` around `0`, where `DN = I - (I - DR[Z0 + M z]) M`.
///
/// The ball in `z` maps into the box `Z0 + B(max(||M||, 1) delta)`, over
/// which `DR` is enclosed in a single interval evaluation.
pub fn certify_contraction(state: &NewtonState, delta: f64) -> Result<ContractionCertificate, FixpointError> {
    let n = state.degree();
    let k = state.basis();
    let m_len = block_len(k);
    let epsilon = newton_operator(state, &TangentVector::zero(n))?.norm_l1();

    let scale = state.m_norm.max(1.0);
    let ball = state.z0.inflated(mul_up(scale, delta));
    let step = renormalize(&ball)?;
    let dr = derivative_matrix(&step, k)?;

    let cols = (0..m_len)
        .into_par_iter()
        .map(|b| {
            scope(|| {
                let mut coords: Vec<IInterval> = (0..m_len).map(|r| IInterval::point(-state.m[(r, b)])).collect();
                coords[b] += IInterval::ONE;
                let mut col = TangentVector::from_block(n, k, &coords);
                for (r, img) in dr.columns.iter().enumerate() {
                    let x = state.m[(r, b)];
                    if x != 0.0 {
                        col.add_scaled(IInterval::point(x), img);
                    }
                }
                col.norm_l1()
            })
        })
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| FixpointError::Renorm(e.into()))?;
    let block_bound = cols.into_iter().fold(0.0, f64::max);
    let tail_bound = dr.psi_tail.norm_l1().max(dr.phi_tail.norm_l1());
    let d_bound = block_bound.max(tail_bound);

    let room = sub_down(1.0, d_bound);
    let valid = d_bound < 1.0 && epsilon < mul_down(room, delta);
    let radius = if valid { div_up(mul_up(scale, epsilon), room) } else { f64::INFINITY };
    Ok(ContractionCertificate {
        epsilon,
        d_bound,
        delta,
        valid,
        block_bound,
        tail_bound,
        m_norm: state.m_norm,
        defect: state.defect,
        truncation: n,
        basis: k,
        radius,
    })
}
