//! Outward-rounded interval arithmetic over doubles.

mod elementary;
mod hexfmt;
mod interval;
pub mod round;

pub use elementary::{exp, ln, pow_flagged, pow_real, root_flagged, root_real};
pub use hexfmt::{format_hex, format_interval, parse_hex, parse_interval};
pub use interval::IInterval;

use round::{set_flags, take_flags, FLAG_NEGATIVE_BASE, FLAG_OVERFLOW, FLAG_STRADDLE};

/// Endpoint type used throughout the crate.
pub type Float = f64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RigorError {
    #[error("divisor interval contains zero")]
    DivisorStraddlesZero,
    #[error("endpoint overflow")]
    Overflow,
    #[error("negative base in real power")]
    NegativeBase,
    #[error("exponent must be positive and finite, got {0}")]
    BadExponent(f64),
    #[error("inverted interval [{lo}, {hi}]")]
    Inverted { lo: f64, hi: f64 },
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// Runs `f` as a rigorous computation: any overflow, division by an interval
/// containing zero, or negative real-power base raised inside turns the whole
/// result into an error. Scopes nest; an inner scope does not leak flags.
pub fn scope<T>(f: impl FnOnce() -> T) -> Result<T, RigorError> {
    let outer = take_flags();
    let out = f();
    let inner = take_flags();
    set_flags(outer);
    flags_to_result(inner).map(|_| out)
}

/// [`scope`] for closures that already return a `Result`.
pub fn scope_result<T, E: From<RigorError>>(f: impl FnOnce() -> Result<T, E>) -> Result<T, E> {
    scope(f)?
}

fn flags_to_result(flags: u8) -> Result<(), RigorError> {
    if flags & FLAG_STRADDLE != 0 {
        Err(RigorError::DivisorStraddlesZero)
    } else if flags & FLAG_NEGATIVE_BASE != 0 {
        Err(RigorError::NegativeBase)
    } else if flags & FLAG_OVERFLOW != 0 {
        Err(RigorError::Overflow)
    } else {
        Ok(())
    }
}
