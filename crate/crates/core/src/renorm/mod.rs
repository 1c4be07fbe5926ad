//! The renormalization operator on maps of class A and its derivative.

mod derivative;
mod element;
mod map;
mod operator;
mod tangent;

pub use derivative::{apply_derivative, derivative_columns, derivative_matrix, mid_block, DerivativeMatrix, Linearization};
pub use element::RenormElement;
pub use map::{certify_increasing, Branch, ClassAMap, CycleMember};
pub use operator::{abs_affine_power, binomial_series, power_map_eval, psi_tilde, renormalize, RenormStep};
pub use tangent::{block_len, TangentVector};

use crate::funcspace::FuncError;
use crate::rigor::RigorError;

#[derive(Debug, thiserror::Error)]
pub enum RenormError {
    #[error("combinatorics broken: {0}")]
    CombinatoricsBroken(String),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed element file: {0}")]
    Format(String),
}

impl From<RigorError> for RenormError {
    fn from(e: RigorError) -> Self {
        RenormError::Func(FuncError::Rigor(e))
    }
}
