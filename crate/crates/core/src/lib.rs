//! Integer-coefficient power series whose values at enumerated
//! Gaussian-rational points are certified algebraic exactly on a chosen
//! subset, with replayable certificates.

pub mod assembler;
pub mod certificate;
pub mod error;
pub mod format;
pub mod interpolation;
pub mod points;
pub mod polyseries;
pub mod radius;
pub mod scalar;
pub mod vanishing;
pub mod verify;

#[cfg(test)]
mod testgen;

pub use error::{Error, Result};
