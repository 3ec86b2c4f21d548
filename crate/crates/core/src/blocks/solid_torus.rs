
#[allow(unused_imports)] // std shadows these when it is linked
use num_traits::Float;
use crate::math::{grid, ScalarFn};
use crate::{Error, Result};

use super::{lutz_valid_on, BoundaryJet, LutzPair, LutzReport};

/// Solid torus `S¹ × D²` in coordinates `(θ, r, ψ)` carrying
/// `α = φ(r) dθ + r² dψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockA {
    phi: ScalarFn,
    radius: f64,
}

impl BlockA {
    /// Requires `R > 0` and `φ > 0` on `[0, R]`.
    pub fn new(phi: ScalarFn, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBlock(alloc::format!("solid torus radius {radius}")));
        }
        if let Some(r) = grid(0.0, radius, 1024).find(|&r| !(phi.eval(r) > 0.0)) {
            return Err(Error::InvalidBlock(alloc::format!("phi is not positive at r = {r}")));
        }
        Ok(Self { phi, radius })
    }

    pub fn phi(&self) -> &ScalarFn {
        &self.phi
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The form coefficients `(φ(r), r²)` as functions of the radius.
    pub fn boundary_pair(&self) -> LutzPair {
        boundary_pair(&self.phi)
    }

    /// Lutz check on the collar `[0.9R, R]`; fails where `φ′ = 2φ/r`.
    pub fn boundary_lutz(&self) -> LutzReport {
        lutz_valid_on(&self.boundary_pair(), 0.9 * self.radius, self.radius)
    }

    /// Jet at `r = R` along the outward normal.
    pub fn boundary_jet(&self) -> BoundaryJet {
        BoundaryJet::of_pair(&self.boundary_pair(), self.radius)
    }
}

/// Coefficients `(φ(r), r²)` of `α = φ dθ + r² dψ`, with `W = r²(φ′ − 2φ/r)`.
pub fn boundary_pair(phi: &ScalarFn) -> LutzPair {
    LutzPair::new(phi.clone(), ScalarFn::polynomial([0.0, 0.0, 1.0]))
}

/// `X = −2∂θ + (φ′(r)/r)∂ψ`, the field with `ι_X(r dr∧dθ∧dψ) = dα`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolidTorusField {
    phi: ScalarFn,
    /// `φ″(0)`, the continuous extension of `φ′/r` to the core.
    core_rate: f64,
}

/// Step for the one-sided difference giving `φ″(0)`.
const CORE_STEP: f64 = 1e-4;
/// Below this radius `φ′/r` is replaced by `φ″(0)`.
const CORE_RADIUS: f64 = 1e-6;

pub fn block_a_field(block: &BlockA) -> Result<SolidTorusField> {
    let slope = block.phi.deriv(0.0);
    if slope.abs() > 1e-9 {
        return Err(Error::SingularCore { slope });
    }
    let h = CORE_STEP;
    let core_rate = (-3.0 * slope + 4.0 * block.phi.deriv(h) - block.phi.deriv(2.0 * h)) / (2.0 * h);
    Ok(SolidTorusField { phi: block.phi.clone(), core_rate })
}

impl SolidTorusField {
    /// Components `(Xθ, Xr, Xψ)` at `(θ, r, ψ)`.
    pub fn velocity(&self, x: &[f64; 3]) -> [f64; 3] {
        let r = x[1];
        let psi_rate = if r.abs() < CORE_RADIUS { self.core_rate } else { self.phi.deriv(r) / r };
        [-2.0, 0.0, psi_rate]
    }

    /// Divergence with respect to `r dr∧dθ∧dψ`, by centered differences.
    pub fn divergence(&self, x: &[f64; 3], h: f64) -> f64 {
        let flux = |y: [f64; 3], axis: usize| y[1] * self.velocity(&y)[axis];
        let mut total = 0.0;
        for axis in 0..3 {
            let mut plus = *x;
            let mut minus = *x;
            plus[axis] += h;
            minus[axis] -= h;
            total += (flux(plus, axis) - flux(minus, axis)) / (2.0 * h);
        }
        total / x[1]
    }
}
