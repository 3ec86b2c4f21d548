//! Deterministic numerical kernel shared by every other module.

mod ode;
mod quad;
mod rng;
mod roots;
mod scalar;

pub use ode::{rk4_flow, rk4_step, Flow};
pub use quad::{gauss_legendre, integrate, integrate_with, QuadSettings};
pub use rng::{RngStream, StreamCursor};
pub use roots::{find_roots, find_roots_with, ROOT_SCAN_PANELS};
pub use scalar::{
    derivative_check, derivative_mismatch, CubicHermite, Family, PiecewiseLinear, PolarComponent, PolarHermite, Primitive, ScalarFn,
};

/// Uniform grid of `n + 1` points on `[a, b]`.
pub(crate) fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| {
        if i == n {
            b
        } else {
            a + (b - a) * (i as f64) / (n as f64)
        }
    })
}
