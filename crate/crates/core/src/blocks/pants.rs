
use crate::math::{grid, ScalarFn};
use crate::{Error, Result};

use super::{lutz_valid_on, BoundaryJet, LutzPair, LutzReport};

/// Collar parameter range `r ∈ [−1, 0]`; the boundary torus sits at `r = 0`.
pub const COLLAR_RANGE: (f64, f64) = (-1.0, 0.0);

/// Boundary data of one pants collar: `α = φ(r) dθ + h(r) dψ` near the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct Collar {
    pub h: ScalarFn,
    pub phi: ScalarFn,
}

impl Collar {
    pub fn pair(&self) -> LutzPair {
        LutzPair::new(self.phi.clone(), self.h.clone())
    }

    /// Jet at `r = 0`, outward.
    pub fn boundary_jet(&self) -> BoundaryJet {
        BoundaryJet::of_pair(&self.pair(), COLLAR_RANGE.1)
    }

    /// Lutz check on the outer tenth of the collar.
    pub fn lutz(&self) -> LutzReport {
        lutz_valid_on(&self.pair(), -0.1, 0.0)
    }
}

/// `S¹ × P` for a pair of pants `P`; only the three boundary collars are modelled.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockB {
    collars: [Collar; 3],
}

impl BlockB {
    /// Requires `h′ > 0` and `φ′ ≥ 0` across each collar.
    pub fn new(collars: [Collar; 3]) -> Result<Self> {
        for (i, c) in collars.iter().enumerate() {
            for r in grid(COLLAR_RANGE.0, COLLAR_RANGE.1, 1024) {
                if !(c.h.deriv(r) > 0.0) {
                    return Err(Error::InvalidBlock(alloc::format!("collar {i}: h' <= 0 at r = {r}")));
                }
                if c.phi.deriv(r) < 0.0 {
                    return Err(Error::InvalidBlock(alloc::format!("collar {i}: phi' < 0 at r = {r}")));
                }
            }
        }
        Ok(Self { collars })
    }

    pub fn collars(&self) -> &[Collar; 3] {
        &self.collars
    }

    pub fn boundary_jet(&self, torus: usize) -> Option<BoundaryJet> {
        self.collars.get(torus).map(Collar::boundary_jet)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain() -> Collar {
        Collar { h: ScalarFn::affine(1.0, 1.0), phi: ScalarFn::constant(1.0) }
    }

    #[test]
    fn validates_collars() {
        assert!(BlockB::new([plain(), plain(), plain()]).is_ok());
        let bad = Collar { h: ScalarFn::affine(-1.0, 1.0), phi: ScalarFn::constant(1.0) };
        assert!(BlockB::new([plain(), bad, plain()]).is_err());
        let bad_phi = Collar { h: ScalarFn::affine(1.0, 0.0), phi: ScalarFn::affine(-0.1, 1.0) };
        assert!(BlockB::new([bad_phi, plain(), plain()]).is_err());
    }

    #[test]
    fn constant_phi_collar_is_lutz() {
        // W = φ′h − h′φ = −1
        let c = plain();
        let r = c.lutz();
        assert!(r.is_valid);
        assert!((c.boundary_jet().wronskian() + 1.0).abs() < 1e-15);
    }
}
