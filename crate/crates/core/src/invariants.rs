//! Closed-form invariants of `T²`-invariant flows on the thickened torus.
//!
//! For `X = f(t)∂x₁ + g(t)∂x₂` and the fibration by `x₁`:
//!
//! * winding `∫ β(X) dμ` for a closed form `β ~ n₁dx₁ + n₂dx₂`,
//! * wrappingness `4π ∫|f|`,
//! * trunkenness `4π ∫ min(|f|, |g|)` (unknotted torus),
//! * helicity `∫(Gf − Fg) + G(1)·n₂ + F(1)·n₁` with `F, G` the primitives of `f, g`.
//!
//! Two normalizations are exposed. [`Normalization::Lebesgue`] is the raw
//! volume `dx₁∧dx₂∧dt` (mass 4π²) with the 4π prefactor on wrappingness and
//! trunkenness. [`Normalization::Probability`] divides winding by the mass and
//! wrappingness/trunkenness by their 4π prefactor, which makes `|winding| ≤
//! wrappingness` an inequality between integrals of `f` and `|f|` when `β = dx₁`.

#[allow(unused_imports)] // std shadows these when it is linked
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::blocks::{block_c_field, Profile};
use crate::math::{find_roots_with, integrate_with, QuadSettings, ScalarFn, ROOT_SCAN_PANELS};
use crate::{Error, Result, THICK_TORUS_VOLUME};

/// Tolerance for closed-form equality checks.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Cohomology class `n₁dx₁ + n₂dx₂` of a closed 1-form on the thickened torus.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CohomologyClass {
    pub n1: f64,
    pub n2: f64,
}

impl CohomologyClass {
    pub const ZERO: Self = Self { n1: 0.0, n2: 0.0 };
    /// `dx₁`, the class of the fibration by `x₁`.
    pub const FIBER: Self = Self { n1: 1.0, n2: 0.0 };

    pub const fn new(n1: f64, n2: f64) -> Self {
        Self { n1, n2 }
    }

    pub fn is_finite(&self) -> bool {
        self.n1.is_finite() && self.n2.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Probability,
    Lebesgue,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Probability => "probability",
            Self::Lebesgue => "lebesgue",
        }
    }

    fn winding_factor(&self) -> f64 {
        match self {
            Self::Probability => 1.0,
            Self::Lebesgue => THICK_TORUS_VOLUME,
        }
    }

    fn fiber_factor(&self) -> f64 {
        match self {
            Self::Probability => 1.0,
            Self::Lebesgue => 4.0 * PI,
        }
    }
}

/// The pieces of the helicity of one thickened torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicityParts {
    /// `∫₀¹ (Gf − Fg) dt`, the `∫ α∧dα` term.
    pub self_term: f64,
    /// `F(1) = ∫₀¹ f`.
    pub f_total: f64,
    /// `G(1) = ∫₀¹ g`.
    pub g_total: f64,
}

impl HelicityParts {
    /// Adds `∫ β∧dα = G(1)·n₂ + F(1)·n₁`.
    pub fn total(&self, correction: &CohomologyClass) -> f64 {
        self.self_term + self.g_total * correction.n2 + self.f_total * correction.n1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub normalization: Normalization,
    pub winding: f64,
    pub wrappingness: f64,
    pub trunkenness: f64,
    pub helicity: f64,
    /// Largest flux through a fiber of the fixed `x₁` fibration, in the
    /// normalization of `wrappingness`. An upper bound for the infimum over
    /// isotopic fibrations; for `T²`-invariant flows it equals wrappingness.
    pub fixed_fiber_max_flux: f64,
    /// Section obstruction gap, always in the probability normalization.
    pub gap: f64,
    pub tangency_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub passed: bool,
    /// `wrappingness − |winding|`.
    pub winding_slack: f64,
    /// `fixed_fiber_max_flux − wrappingness`.
    pub flux_slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionObstruction {
    pub section_possible: bool,
    /// `wrappingness − |winding|` for `β = dx₁`, probability normalization.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitDirection {
    PlusX2,
    MinusX2,
}

/// A torus level `t*` where `f` vanishes; its orbits run along `±∂x₂` and are
/// tangent to every fiber `{x₁ = θ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentOrbit {
    pub t_star: f64,
    pub direction: OrbitDirection,
}

/// Quadrature and root-finding settings shared by all closed-form invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub quad: QuadSettings,
    pub root_tol: f64,
    pub scan_panels: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { quad: QuadSettings::default(), root_tol: 1e-14, scan_panels: ROOT_SCAN_PANELS }
    }
}

impl Numerics {
    fn roots<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        find_roots_with(f, 0.0, 1.0, self.root_tol, self.scan_panels)
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F, breakpoints: &[f64]) -> Result<f64> {
        integrate_with(f, 0.0, 1.0, breakpoints, self.quad)
    }

    pub fn helicity_parts(&self, profile: &Profile) -> Result<HelicityParts> {
        let field = block_c_field(profile);
        let (big_f, big_g) = (field.big_f(), field.big_g());
        let (f, g) = (profile.f(), profile.g());
        let self_term = match (f, g) {
            // G f − F g = (bt)a − (at)b vanishes identically
            (ScalarFn::Constant(_), ScalarFn::Constant(_)) => 0.0,
            _ => self.integrate(|t| big_g.eval(t) * f.eval(t) - big_f.eval(t) * g.eval(t), &profile.kinks())?,
        };
        Ok(HelicityParts { self_term, f_total: big_f.eval(1.0), g_total: big_g.eval(1.0) })
    }

    pub fn helicity(&self, profile: &Profile, correction: &CohomologyClass) -> Result<f64> {
        Ok(self.helicity_parts(profile)?.total(correction))
    }

    pub fn winding(&self, profile: &Profile, beta: &CohomologyClass, normalization: Normalization) -> Result<f64> {
        let (f, g) = (profile.f(), profile.g());
        let v = self.integrate(|t| beta.n1 * f.eval(t) + beta.n2 * g.eval(t), &profile.kinks())?;
        Ok(normalization.winding_factor() * v)
    }

    fn abs_f_integral(&self, profile: &Profile) -> Result<f64> {
        let f = profile.f();
        let mut cuts = self.roots(|t| f.eval(t));
        cuts.extend(f.kinks());
        self.integrate(|t| f.eval(t).abs(), &cuts)
    }

    fn min_integral(&self, profile: &Profile) -> Result<f64> {
        let (f, g) = (profile.f(), profile.g());
        let mut cuts = self.roots(|t| f.eval(t));
        cuts.extend(self.roots(|t| g.eval(t)));
        cuts.extend(self.roots(|t| f.eval(t).abs() - g.eval(t).abs()));
        cuts.extend(profile.kinks());
        self.integrate(|t| f.eval(t).abs().min(g.eval(t).abs()), &cuts)
    }

    pub fn wrappingness(&self, profile: &Profile, normalization: Normalization) -> Result<f64> {
        Ok(normalization.fiber_factor() * self.abs_f_integral(profile)?)
    }

    pub fn trunkenness(&self, profile: &Profile, normalization: Normalization) -> Result<f64> {
        Ok(normalization.fiber_factor() * self.min_integral(profile)?)
    }

    /// Flux through a single fiber annulus `{x₁ = θ}`: `2π∫|f|` under the
    /// Lebesgue volume, `∫|f| / 2π` under the probability volume. This is the
    /// quantity the Monte Carlo estimator sees.
    pub fn fiber_flux(&self, profile: &Profile, normalization: Normalization) -> Result<f64> {
        let v = self.abs_f_integral(profile)?;
        Ok(match normalization {
            Normalization::Lebesgue => crate::TAU * v,
            Normalization::Probability => v / crate::TAU,
        })
    }

    pub fn section_obstruction(&self, profile: &Profile) -> Result<SectionObstruction> {
        let wrap = self.wrappingness(profile, Normalization::Probability)?;
        let wind = self.winding(profile, &CohomologyClass::FIBER, Normalization::Probability)?;
        let gap = wrap - wind.abs();
        Ok(SectionObstruction { section_possible: gap <= EQUALITY_TOL, gap })
    }

    pub fn tangent_orbits(&self, profile: &Profile) -> Result<Vec<TangentOrbit>> {
        let (f, g) = (profile.f(), profile.g());
        self.roots(|t| f.eval(t))
            .into_iter()
            .map(|t_star| {
                let gv = g.eval(t_star);
                if gv.abs() <= 1e-12 {
                    return Err(Error::SingularField { t: t_star });
                }
                let direction = if gv > 0.0 { OrbitDirection::PlusX2 } else { OrbitDirection::MinusX2 };
                Ok(TangentOrbit { t_star, direction })
            })
            .collect()
    }

    pub fn report(
        &self,
        profile: &Profile,
        beta: &CohomologyClass,
        correction: &CohomologyClass,
        normalization: Normalization,
    ) -> Result<InvariantReport> {
        let wrappingness = self.wrappingness(profile, normalization)?;
        Ok(InvariantReport {
            normalization,
            winding: self.winding(profile, beta, normalization)?,
            wrappingness,
            trunkenness: self.trunkenness(profile, normalization)?,
            helicity: self.helicity(profile, correction)?,
            fixed_fiber_max_flux: wrappingness,
            gap: self.section_obstruction(profile)?.gap,
            tangency_count: self.tangent_orbits(profile)?.len(),
        })
    }
}

pub fn helicity_block_c(profile: &Profile, correction: &CohomologyClass) -> Result<f64> {
    Numerics::default().helicity(profile, correction)
}

pub fn winding_block_c(profile: &Profile, beta: &CohomologyClass, normalization: Normalization) -> Result<f64> {
    Numerics::default().winding(profile, beta, normalization)
}

/// `4π ∫₀¹ |f| dt`.
pub fn wrappingness_block_c(profile: &Profile) -> Result<f64> {
    Numerics::default().wrappingness(profile, Normalization::Lebesgue)
}

/// `4π ∫₀¹ min(|f|, |g|) dt`; assumes the thickened torus is unknotted.
pub fn trunkenness_block_c(profile: &Profile) -> Result<f64> {
    Numerics::default().trunkenness(profile, Normalization::Lebesgue)
}

pub fn section_obstruction(profile: &Profile) -> Result<SectionObstruction> {
    Numerics::default().section_obstruction(profile)
}

pub fn tangent_orbit_detect(profile: &Profile) -> Result<Vec<TangentOrbit>> {
    Numerics::default().tangent_orbits(profile)
}

/// `|winding| ≤ wrappingness ≤ fixed-fiber max flux`, compared in the
/// probability normalization.
pub fn check_inequalities(report: &InvariantReport, tol: f64) -> InequalityCheck {
    let (wind, wrap, flux) = match report.normalization {
        Normalization::Probability => (report.winding, report.wrappingness, report.fixed_fiber_max_flux),
        Normalization::Lebesgue => (
            report.winding / THICK_TORUS_VOLUME,
            report.wrappingness / (4.0 * PI),
            report.fixed_fiber_max_flux / (4.0 * PI),
        ),
    };
    let winding_slack = wrap - wind.abs();
    let flux_slack = flux - wrap;
    InequalityCheck { passed: winding_slack >= -tol && flux_slack >= -tol, winding_slack, flux_slack }
}

/// Trunk of the `(p, q)` torus knot, `2·min(|p|, |q|)`.
///
/// When one of `p, q` is zero the curve is a core circle, an unknot, whose
/// trunk is 2.
pub fn torus_knot_trunk(p: i64, q: i64) -> Result<u64> {
    let (a, b) = (p.unsigned_abs(), q.unsigned_abs());
    if gcd(a, b) != 1 {
        return Err(Error::NotAKnot { p, q });
    }
    Ok((2 * a.min(b)).max(2))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Lower bound `max(trunk(L′), wrap(L′) + trunk(L))` for `trunk(L′ ∪ L)`.
pub fn trunk_union_bounds(trunk_l: i64, wrap_lp: i64, trunk_lp: i64) -> Result<i64> {
    if trunk_l < 0 || wrap_lp < 0 || trunk_lp < 0 {
        return Err(Error::Domain(alloc::format!("negative input ({trunk_l}, {wrap_lp}, {trunk_lp})")));
    }
    if trunk_l % 2 != 0 || trunk_lp % 2 != 0 {
        return Err(Error::Domain(alloc::format!("odd trunk ({trunk_l}, {trunk_lp})")));
    }
    Ok(trunk_lp.max(wrap_lp + trunk_l))
}

/// The closed form printed for `f = a`, `g = Q sin(πt) + b`:
/// `(ab/2 + Q/π) + M₁(Q/π + b) + aM₂`.
///
/// Kept for comparison only. Direct integration of the same profile gives
/// `∫(Gf − Fg) = 0` and a correction `(2Q/π + b)·M₂ + a·M₁`.
pub fn printed_sine_example_helicity(a: f64, b: f64, q: f64, correction: &CohomologyClass) -> f64 {
    (a * b / 2.0 + q / PI) + correction.n1 * (q / PI + b) + a * correction.n2
}
