//! Validated numerics for the Fibonacci renormalization fixed point of
//! non-integer critical degree, its distortion constant, escape statistics
//! and the resulting wild-attractor trichotomy.

pub mod attractor;
pub mod distortion;
pub mod fixpoint;
pub mod funcspace;
pub mod renorm;
pub mod rigor;

#[cfg(test)]
mod testutil;
