//! Locating the renormalization fixed point and certifying it with an
//! approximate-Newton contraction.

mod certify;
mod finder;

pub use certify::{certify_contraction, newton_operator, ContractionCertificate, NewtonState};
pub use finder::{approximate_fixed_point, default_seed, find_approximate_fixed_point, reference_scalars};

use crate::renorm::{RenormElement, RenormError};

/// Truncation degree, basis cut and ball radius for one certification run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile {
    pub truncation: usize,
    pub basis: usize,
    pub delta: f64,
}

impl Profile {
    pub const DESK: Profile = Profile { truncation: 80, basis: 40, delta: 1e-8 };

    /// Seconds-scale run that certifies both reference degrees; the default
    /// for downstream dynamics.
    pub const STANDARD: Profile = Profile { truncation: 100, basis: 100, delta: 1e-10 };

    /// Full-size run with the reference ball radii.
    pub fn proof(d: f64) -> Profile {
        let delta = if d < 4.5 { 4.28577601155835506e-12 } else { 3.34356454892135768e-12 };
        Profile { truncation: 300, basis: 250, delta }
    }
}

/// Outcome of a full run: approximate fixed point, certificate and, when
/// valid, an enclosure of the true fixed point.
#[derive(Clone, Debug)]
pub struct CertifiedFixedPoint {
    pub z0: RenormElement,
    pub certificate: ContractionCertificate,
    pub enclosure: Option<RenormElement>,
}

/// Finds and certifies the fixed point of degree `d` with `profile`.
pub fn certified_fixed_point(d: f64, profile: Profile) -> Result<CertifiedFixedPoint, FixpointError> {
    let z0 = approximate_fixed_point(d, profile.truncation)?;
    let state = NewtonState::new(&z0, profile.basis)?;
    let certificate = certify_contraction(&state, profile.delta)?;
    let enclosure = certificate.enclosure(&state.z0);
    Ok(CertifiedFixedPoint { z0: state.z0, certificate, enclosure })
}

#[derive(Debug, thiserror::Error)]
pub enum FixpointError {
    #[error("Newton iteration did not converge: residual {residual:e}")]
    NoConvergence { residual: f64 },
    #[error("I - Da is numerically singular")]
    Singular,
    #[error(transparent)]
    Renorm(#[from] RenormError),
}

#[cfg(test)]
mod tests;
