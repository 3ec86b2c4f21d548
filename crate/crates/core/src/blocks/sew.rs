//! Constructive sewing: extend Lutz boundary data across `T² × [0,1]`.
//!
//! Writing `(p, q) = R(cos Θ, sin Θ)` gives `W = p′q − q′p = −R²Θ′`, so a pair
//! is Lutz exactly when `R > 0` and `Θ` is strictly monotone. The extension
//! interpolates `ln R` and `Θ` with cubic Hermite pieces matching both jets,
//! adding full turns to `Θ` until the interpolant is monotone.

#[allow(unused_imports)] // std shadows these when it is linked
use num_traits::Float;
use alloc::sync::Arc;

use crate::math::{CubicHermite, PolarComponent, PolarHermite, ScalarFn};
use crate::{Error, Result, TAU};

use super::{BoundaryJet, LutzPair};

/// A cubic Hermite segment with endpoint slopes `d0, d1` and rise `Δ` is
/// strictly monotone whenever `0 < dᵢ/Δ < 3`.
const MAX_SLOPE_RATIO: f64 = 2.99;

#[derive(Debug, Clone, PartialEq)]
pub struct Sewing {
    pub pair: LutzPair,
    pub curve: Arc<PolarHermite>,
    /// Full turns added beyond the shortest rotation in the forced direction.
    pub turns: u32,
    pub angle_start: f64,
    pub angle_end: f64,
}

/// Extends the jet at `t = 0` and the jet at `t = 1` to a Lutz pair on `[0, 1]`.
///
/// `extra_turns` is a lower bound on the number of added full turns.
pub fn sew_lutz(left: &BoundaryJet, right: &BoundaryJet, extra_turns: u32) -> Result<Sewing> {
    let (r0, r1) = (left.magnitude(), right.magnitude());
    if !(r0 > 1e-12) || !(r1 > 1e-12) {
        return Err(Error::DegenerateJet);
    }
    let (w0, w1) = (left.wronskian(), right.wronskian());
    if !(w0 * w1 > 0.0) {
        return Err(Error::Unsewable { left: w0, right: w1 });
    }

    let polar = |jet: &BoundaryJet, r: f64| {
        let r2 = r * r;
        let angle = jet.q.atan2(jet.p);
        let angle_rate = -jet.wronskian() / r2;
        let log_rate = (jet.p * jet.dp + jet.q * jet.dq) / r2;
        (angle, angle_rate, r.ln(), log_rate)
    };
    let (th0, dth0, l0, dl0) = polar(left, r0);
    let (th1, dth1, l1, dl1) = polar(right, r1);

    let s = dth0.signum();
    // shortest rotation from th0 toward th1 in direction s, in [0, 2π)
    let turn = s * (th1 - th0);
    let base = turn - TAU * (turn / TAU).floor();
    let mut turns = extra_turns;
    let rise = loop {
        let rise = s * (base + TAU * f64::from(turns));
        let feasible = rise != 0.0 && dth0 / rise < MAX_SLOPE_RATIO && dth1 / rise < MAX_SLOPE_RATIO;
        if feasible {
            break rise;
        }
        turns += 1;
    };

    let curve = Arc::new(PolarHermite {
        log_radius: CubicHermite { y0: l0, y1: l1, d0: dl0, d1: dl1 },
        angle: CubicHermite { y0: th0, y1: th0 + rise, d0: dth0, d1: dth1 },
    });
    let pair = LutzPair::new(
        ScalarFn::Sewn { curve: curve.clone(), component: PolarComponent::Cos },
        ScalarFn::Sewn { curve: curve.clone(), component: PolarComponent::Sin },
    );
    Ok(Sewing { pair, curve, turns, angle_start: th0, angle_end: th0 + rise })
}
