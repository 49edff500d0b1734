//! Core numerics for desk-scale decoupling experiments on the truncated
//! paraboloid: cap/tube/plate geometry, Fourier extension by direct
//! quadrature, wave-packet decompositions, fractal measures and weights,
//! decoupling-ratio measurement, and the good/bad tube machinery used in
//! pinned distance-set experiments.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only switches float intrinsics and enables `std::error::Error`.
//! Everything here is pure and deterministic: identical inputs (including
//! seeds) produce bit-identical outputs.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod decoupling;
pub mod distance;
mod error;
pub mod extension;
pub mod geometry;
mod linalg;
pub mod report;
pub mod sharp_example;
mod sphere;
mod sums;
pub mod weights;

pub use error::Error;
pub use report::ExperimentReport;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Compactly supported bump `exp(-1/(1-u^2))` on `|u| < 1`, zero outside.
///
/// All smooth cutoffs in the crate (spatial tube windows, mollifiers) are
/// built from this one profile so that different modules agree exactly.
pub fn bump(u: f64) -> f64 {
    #[allow(unused_imports)]
use num_traits::Float;
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::bump;

    #[test]
    fn bump_support_and_symmetry() {
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.2), 0.0);
        assert!(bump(0.0) > bump(0.5));
        assert_eq!(bump(0.3), bump(-0.3));
    }
}
