#[allow(unused_imports)] // std shadows these when it is linked
use num_traits::Float;
use alloc::vec::Vec;

use crate::math::{grid, ScalarFn};
use crate::{Error, Result, THICK_TORUS_VOLUME};

/// Grid resolution for nonvanishing checks on `[0, 1]`.
pub const PROFILE_GRID: usize = 1024;

/// Velocity profile `X = f(t)∂x₁ + g(t)∂x₂` of a `T²`-invariant field on the
/// thickened torus.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    f: ScalarFn,
    g: ScalarFn,
}

impl Profile {
    /// Rejects profiles whose field vanishes somewhere on the check grid.
    pub fn new(f: ScalarFn, g: ScalarFn) -> Result<Self> {
        for t in grid(0.0, 1.0, PROFILE_GRID) {
            let (fv, gv) = (f.eval(t), g.eval(t));
            if !fv.is_finite() || !gv.is_finite() {
                return Err(Error::Evaluation { t });
            }
            if fv.hypot(gv) <= 1e-12 {
                return Err(Error::SingularField { t });
            }
        }
        Ok(Self { f, g })
    }

    pub fn constant(a: f64, b: f64) -> Result<Self> {
        Self::new(ScalarFn::constant(a), ScalarFn::constant(b))
    }

    pub fn f(&self) -> &ScalarFn {
        &self.f
    }

    pub fn g(&self) -> &ScalarFn {
        &self.g
    }

    pub fn velocity(&self, t: f64) -> (f64, f64) {
        (self.f.eval(t), self.g.eval(t))
    }

    /// Kinks of either component.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k = self.f.kinks();
        k.extend(self.g.kinks());
        k.sort_by(|a, b| a.total_cmp(b));
        k.dedup();
        k
    }

    /// `(λf, λg)`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.f.scaled(lambda), self.g.scaled(lambda))
    }

    /// `(g, f)`.
    pub fn swapped(&self) -> Self {
        Self { f: self.g.clone(), g: self.f.clone() }
    }
}

/// Coefficients of the `T²`-invariant 1-form `α = p(t)dx₁ + q(t)dx₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct LutzPair {
    pub p: ScalarFn,
    pub q: ScalarFn,
}

impl LutzPair {
    pub fn new(p: ScalarFn, q: ScalarFn) -> Self {
        Self { p, q }
    }

    /// `W = p′q − q′p`.
    pub fn wronskian(&self, t: f64) -> f64 {
        self.p.deriv(t) * self.q.eval(t) - self.q.deriv(t) * self.p.eval(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WronskianSign {
    Positive,
    Negative,
    /// Changes sign or vanishes identically.
    Mixed,
}

impl WronskianSign {
    pub fn of(w: f64) -> Self {
        if w > 0.0 {
            Self::Positive
        } else if w < 0.0 {
            Self::Negative
        } else {
            Self::Mixed
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LutzReport {
    pub is_valid: bool,
    pub min_abs_wronskian: f64,
    pub sign: WronskianSign,
}

/// Lutz condition on `[0, 1]`.
pub fn lutz_valid(pair: &LutzPair) -> LutzReport {
    lutz_valid_on(pair, 0.0, 1.0)
}

/// Checks `W ≠ 0` with constant sign on `[a, b]`: a 1024-panel scan followed
/// by golden-section refinement around every local minimum of `|W|`.
pub fn lutz_valid_on(pair: &LutzPair, a: f64, b: f64) -> LutzReport {
    let nodes: Vec<f64> = grid(a, b, PROFILE_GRID).collect();
    let w: Vec<f64> = nodes.iter().map(|&t| pair.wronskian(t)).collect();

    let mut positive = false;
    let mut negative = false;
    let mut min_abs = f64::INFINITY;
    let mut note = |v: f64| {
        if v > 0.0 {
            positive = true;
        } else if v < 0.0 {
            negative = true;
        }
        if !v.is_finite() {
            positive = true;
            negative = true;
        }
        min_abs = min_abs.min(v.abs());
    };
    for &v in &w {
        note(v);
    }
    for i in 0..nodes.len() {
        let here = w[i].abs();
        let left_ok = i == 0 || w[i - 1].abs() >= here;
        let right_ok = i + 1 == nodes.len() || w[i + 1].abs() >= here;
        if left_ok && right_ok {
            let lo = nodes[i.saturating_sub(1)];
            let hi = nodes[(i + 1).min(nodes.len() - 1)];
            let t = golden_min(|t| pair.wronskian(t).abs(), lo, hi);
            note(pair.wronskian(t));
        }
    }

    let sign = match (positive, negative) {
        (true, false) => WronskianSign::Positive,
        (false, true) => WronskianSign::Negative,
        _ => WronskianSign::Mixed,
    };
    LutzReport { is_valid: sign != WronskianSign::Mixed && min_abs > 1e-12, min_abs_wronskian: min_abs, sign }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 { x1 } else { x2 }
}

/// Thickened torus `T² × [0,1]`, both angles of period 2π, volume `dx₁∧dx₂∧dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockC {
    pub profile: Profile,
}

impl BlockC {
    pub const X1_PERIOD: f64 = crate::TAU;
    pub const X2_PERIOD: f64 = crate::TAU;
    pub const VOLUME: f64 = THICK_TORUS_VOLUME;

    pub fn new(profile: Profile) -> Self {
        Self { profile }
    }
}

/// The field of a [`Profile`] together with its primitives `F = ∫₀ᵗ f`,
/// `G = ∫₀ᵗ g`, so that `α = G dx₁ − F dx₂` satisfies `dα = ι_X Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCField {
    profile: Profile,
    big_f: ScalarFn,
    big_g: ScalarFn,
}

pub fn block_c_field(profile: &Profile) -> BlockCField {
    BlockCField { profile: profile.clone(), big_f: profile.f().primitive(), big_g: profile.g().primitive() }
}

impl BlockCField {
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Velocity at `(x₁, x₂, t)`; the `t` component is always zero.
    pub fn velocity(&self, x: &[f64; 3]) -> [f64; 3] {
        let (f, g) = self.profile.velocity(x[2]);
        [f, g, 0.0]
    }

    /// `F(t) = ∫₀ᵗ f`.
    pub fn big_f(&self) -> &ScalarFn {
        &self.big_f
    }

    /// `G(t) = ∫₀ᵗ g`.
    pub fn big_g(&self) -> &ScalarFn {
        &self.big_g
    }

    /// Coefficients `(G, −F)` of the primitive 1-form.
    pub fn primitive_pair(&self) -> LutzPair {
        LutzPair::new(self.big_g.clone(), self.big_f.scaled(-1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::derivative_check;
    use core::f64::consts::PI;

    #[test]
    fn rejects_vanishing_field() {
        let err = Profile::new(ScalarFn::affine(1.0, -0.5), ScalarFn::affine(1.0, -0.5)).unwrap_err();
        match err {
            Error::SingularField { t } => assert!((t - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lutz_examples() {
        let circle = LutzPair::new(ScalarFn::sinusoid(1.0, 2, PI / 2.0, 0.0), ScalarFn::sinusoid(1.0, 2, 0.0, 0.0));
        let r = lutz_valid(&circle);
        assert!(r.is_valid);
        assert_eq!(r.sign, WronskianSign::Negative);
        assert!((r.min_abs_wronskian - 2.0 * PI).abs() < 1e-9);
        for t in [0.0, 0.3, 0.77] {
            assert!((circle.wronskian(t) + 2.0 * PI).abs() < 1e-9);
        }

        let proportional = LutzPair::new(ScalarFn::affine(1.0, 0.0), ScalarFn::affine(1.0, 0.0));
        let r = lutz_valid(&proportional);
        assert!(!r.is_valid);
        assert_eq!(r.min_abs_wronskian, 0.0);

        let r = lutz_valid(&LutzPair::new(ScalarFn::constant(1.0), ScalarFn::affine(1.0, 0.0)));
        assert!(r.is_valid);
        assert_eq!(r.sign, WronskianSign::Negative);
        assert_eq!(r.min_abs_wronskian, 1.0);
    }

    #[test]
    fn refinement_finds_zero_between_grid_nodes() {
        // (p, q) = (1, h) has W = −h′; h = t³/3 − ct² + c²t gives h′ = (t − c)², zero off-grid
        let c = 0.123_456_7;
        let pair = LutzPair::new(ScalarFn::constant(1.0), ScalarFn::polynomial([0.0, c * c, -c, 1.0 / 3.0]));
        let r = lutz_valid(&pair);
        assert!(!r.is_valid);
        assert!(r.min_abs_wronskian < 1e-12);
    }

    #[test]
    fn block_c_primitives() {
        let p = Profile::constant(1.0, 0.0).unwrap();
        let field = block_c_field(&p);
        assert_eq!(field.velocity(&[0.3, 1.0, 0.4]), [1.0, 0.0, 0.0]);
        assert!((field.big_f().eval(0.37) - 0.37).abs() < 1e-15);
        assert_eq!(field.big_g().eval(0.8), 0.0);

        let (a, q, b) = (0.7, 1.3, -0.4);
        let sine = Profile::new(ScalarFn::constant(a), ScalarFn::sinusoid(q, 1, 0.0, b)).unwrap();
        let field = block_c_field(&sine);
        for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let g_exact = -(q / PI) * (PI * t).cos() + q / PI + b * t;
            assert!((field.big_f().eval(t) - a * t).abs() < 1e-14);
            assert!((field.big_g().eval(t) - g_exact).abs() < 1e-14);
        }

        let full = Profile::new(ScalarFn::sinusoid(1.0, 2, 0.0, 0.0), ScalarFn::sinusoid(1.0, 2, PI / 2.0, 0.0)).unwrap();
        let field = block_c_field(&full);
        assert!(field.big_f().eval(1.0).abs() < 1e-14);
        assert!(field.big_g().eval(1.0).abs() < 1e-14);
    }

    #[test]
    fn primitive_pair_is_dual_to_field() {
        let p = Profile::new(ScalarFn::sinusoid(0.8, 3, 0.4, 0.2), ScalarFn::polynomial([1.0, -0.5, 2.0])).unwrap();
        let field = block_c_field(&p);
        assert!(derivative_check(field.big_f(), 101, 1e-5) < 1e-8);
        assert!(derivative_check(field.big_g(), 101, 1e-5) < 1e-8);
        let pair = field.primitive_pair();
        for t in [0.1, 0.5, 0.9] {
            assert!((pair.p.deriv(t) - p.g().eval(t)).abs() < 1e-15);
            assert!((pair.q.deriv(t) + p.f().eval(t)).abs() < 1e-15);
        }
    }
}
