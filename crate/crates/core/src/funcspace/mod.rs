//! Enclosures of analytic functions on `[-1, 1]`.

mod affine;
mod enclosure;
mod newton;
mod powers;

pub use affine::{compose_affine_post, compose_affine_pre, AffineMap, Orientation};
pub use enclosure::{tail_derivative_factor, FuncEnclosure};
pub use newton::{newton_solve, solve_inverse, Differentiable, FnPair};
pub use powers::PowerTable;

use crate::rigor::{IInterval, RigorError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FuncError {
    #[error("argument {0:?} leaves [-1, 1]")]
    DomainViolation(IInterval),
    #[error("inner function has l1 norm {0} > 1")]
    RangeViolation(f64),
    #[error("affine map with degenerate domain")]
    DegenerateAffine,
    #[error("no Newton certificate: eps={eps:e}, D={d_bound:e}, delta={delta:e}")]
    NoCertificate { eps: f64, d_bound: f64, delta: f64 },
    #[error("derivative vanishes at the starting point")]
    DerivativeVanishes,
    #[error(transparent)]
    Rigor(#[from] RigorError),
    #[error("malformed enclosure file: {0}")]
    Format(String),
}
