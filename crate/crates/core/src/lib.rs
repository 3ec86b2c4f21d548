//! Volume-preserving flows on thickened tori and the blocks they are glued from.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure function
//! of its inputs: the numerical kernel in [`math`], the solid torus / pants /
//! thickened torus models in [`blocks`], closed-form winding, wrappingness,
//! trunkenness and helicity in [`invariants`], the Monte Carlo flux estimator
//! in [`flux`] and block assemblies in [`assembly`].
//!
//! IO, configuration files and thread pools live in the `fluxknot` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod blocks;
mod error;
pub mod flux;
pub mod invariants;
pub mod math;

pub use error::{Error, Result};

/// Full turn, the period of every angular coordinate.
pub const TAU: f64 = core::f64::consts::TAU;

/// Lebesgue volume of `T² × [0,1]` with `x₁, x₂ ∈ [0, 2π)`.
pub const THICK_TORUS_VOLUME: f64 = TAU * TAU;
