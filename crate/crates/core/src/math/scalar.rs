//! Scalar functions of one variable with analytic derivatives.

#[allow(unused_imports)] // std shadows these when it is linked
use num_traits::Float;
use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::quad::gauss_legendre;
use crate::{Error, Result};

/// Which closed-form family a [`ScalarFn`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Constant,
    Affine,
    Sinusoid,
    Polynomial,
    PiecewiseLinear,
    Sewn,
    /// Antiderivative table built by quadrature.
    Primitive,
    /// Sums and scalings of other functions.
    Composite,
}

/// A real function of one variable together with its derivative.
///
/// Values are defined for every real `t`; the families extend naturally past
/// `[0, 1]` (piecewise-linear functions are held constant outside their knots).
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFn {
    Constant(f64),
    Affine { slope: f64, intercept: f64 },
    /// `amplitude · sin(π · frequency · t + phase) + offset`, so `frequency`
    /// counts half periods on `[0, 1]`.
    Sinusoid { amplitude: f64, frequency: i32, phase: f64, offset: f64 },
    /// Coefficients in ascending order.
    Polynomial(Vec<f64>),
    PiecewiseLinear(PiecewiseLinear),
    Sewn { curve: Arc<PolarHermite>, component: PolarComponent },
    Primitive(Arc<Primitive>),
    Sum(Vec<ScalarFn>),
    Scaled(f64, Box<ScalarFn>),
}

impl ScalarFn {
    pub fn constant(c: f64) -> Self {
        Self::Constant(c)
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::Affine { slope, intercept }
    }

    pub fn sinusoid(amplitude: f64, frequency: i32, phase: f64, offset: f64) -> Self {
        Self::Sinusoid { amplitude, frequency, phase, offset }
    }

    pub fn polynomial(coefficients: impl Into<Vec<f64>>) -> Self {
        Self::Polynomial(coefficients.into())
    }

    pub fn piecewise_linear(knots: impl Into<Vec<(f64, f64)>>) -> Result<Self> {
        PiecewiseLinear::new(knots.into()).map(Self::PiecewiseLinear)
    }

    /// `Σ cᵢ · fᵢ`, dropping zero coefficients and skipping unit scalings.
    pub fn linear_combination(terms: &[(f64, &ScalarFn)]) -> Self {
        let mut parts: Vec<ScalarFn> = terms
            .iter()
            .filter(|(c, _)| *c != 0.0)
            .map(|&(c, f)| if c == 1.0 { f.clone() } else { Self::Scaled(c, Box::new(f.clone())) })
            .collect();
        match parts.len() {
            0 => Self::Constant(0.0),
            1 => parts.pop().unwrap(),
            _ => Self::Sum(parts),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::linear_combination(&[(c, self)])
    }

    pub fn plus(&self, other: &ScalarFn) -> Self {
        Self::linear_combination(&[(1.0, self), (1.0, other)])
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Constant(_) => Family::Constant,
            Self::Affine { .. } => Family::Affine,
            Self::Sinusoid { .. } => Family::Sinusoid,
            Self::Polynomial(_) => Family::Polynomial,
            Self::PiecewiseLinear(_) => Family::PiecewiseLinear,
            Self::Sewn { .. } => Family::Sewn,
            Self::Primitive(_) => Family::Primitive,
            Self::Sum(_) | Self::Scaled(..) => Family::Composite,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Affine { slope, intercept } => slope * t + intercept,
            Self::Sinusoid { amplitude, frequency, phase, offset } => {
                amplitude * (PI * f64::from(*frequency) * t + phase).sin() + offset
            }
            Self::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &a| acc * t + a),
            Self::PiecewiseLinear(p) => p.eval(t),
            Self::Sewn { curve, component } => curve.eval(*component, t).0,
            Self::Primitive(p) => p.eval(t),
            Self::Sum(parts) => parts.iter().map(|f| f.eval(t)).sum(),
            Self::Scaled(c, f) => c * f.eval(t),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Affine { slope, .. } => *slope,
            Self::Sinusoid { amplitude, frequency, phase, .. } => {
                let w = PI * f64::from(*frequency);
                amplitude * w * (w * t + phase).cos()
            }
            Self::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &a)| acc * t + k as f64 * a),
            Self::PiecewiseLinear(p) => p.slope_at(t),
            Self::Sewn { curve, component } => curve.eval(*component, t).1,
            Self::Primitive(p) => p.integrand.eval(t),
            Self::Sum(parts) => parts.iter().map(|f| f.deriv(t)).sum(),
            Self::Scaled(c, f) => c * f.deriv(t),
        }
    }

    /// Points where the function (or its first derivative) is not smooth.
    /// Quadrature must split there.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Self::PiecewiseLinear(p) => p.knots.iter().map(|k| k.0).collect(),
            Self::Primitive(p) => p.integrand.kinks(),
            Self::Sum(parts) => {
                let mut all: Vec<f64> = parts.iter().flat_map(|f| f.kinks()).collect();
                all.sort_by(|a, b| a.total_cmp(b));
                all.dedup();
                all
            }
            Self::Scaled(_, f) => f.kinks(),
            _ => Vec::new(),
        }
    }

    /// Antiderivative vanishing at `t = 0`: closed form where the family has
    /// one, a quadrature table otherwise.
    pub fn primitive(&self) -> ScalarFn {
        match self {
            Self::Constant(c) => Self::affine(*c, 0.0),
            Self::Affine { slope, intercept } => Self::polynomial([0.0, *intercept, 0.5 * slope]),
            Self::Polynomial(c) => {
                let mut out = Vec::with_capacity(c.len() + 1);
                out.push(0.0);
                out.extend(c.iter().enumerate().map(|(k, a)| a / (k + 1) as f64));
                Self::Polynomial(out)
            }
            Self::Sinusoid { amplitude, frequency, phase, offset } if *frequency != 0 => {
                let w = PI * f64::from(*frequency);
                let a = amplitude / w;
                // −(A/w)cos(wt + φ) = (A/w)sin(wt + φ − π/2)
                Self::Sum(alloc::vec![
                    Self::sinusoid(a, *frequency, phase - PI / 2.0, a * phase.cos()),
                    Self::affine(*offset, 0.0),
                ])
            }
            Self::Sinusoid { amplitude, phase, offset, .. } => Self::affine(amplitude * phase.sin() + offset, 0.0),
            Self::Sum(parts) => Self::Sum(parts.iter().map(Self::primitive).collect()),
            Self::Scaled(c, f) => Self::Scaled(*c, Box::new(f.primitive())),
            _ => Self::Primitive(Arc::new(Primitive::new(self.clone()))),
        }
    }
}

impl From<f64> for ScalarFn {
    fn from(c: f64) -> Self {
        Self::Constant(c)
    }
}

/// Piecewise-linear interpolant through strictly increasing knots.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument("piecewise-linear function needs two knots".into()));
        }
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidArgument("knots must be strictly increasing".into()));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn segment(&self, t: f64) -> Option<usize> {
        let n = self.knots.len();
        if t < self.knots[0].0 || t > self.knots[n - 1].0 {
            return None;
        }
        // right-continuous: a knot belongs to the segment it starts
        let idx = self.knots.partition_point(|k| k.0 <= t);
        Some(idx.clamp(1, n - 1) - 1)
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.knots.len();
        match self.segment(t) {
            None if t < self.knots[0].0 => self.knots[0].1,
            None => self.knots[n - 1].1,
            Some(i) => {
                let (t0, v0) = self.knots[i];
                let (t1, v1) = self.knots[i + 1];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    fn slope_at(&self, t: f64) -> f64 {
        match self.segment(t) {
            None => 0.0,
            Some(i) => {
                let (t0, v0) = self.knots[i];
                let (t1, v1) = self.knots[i + 1];
                (v1 - v0) / (t1 - t0)
            }
        }
    }
}

/// Cubic Hermite interpolant on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicHermite {
    pub y0: f64,
    pub y1: f64,
    pub d0: f64,
    pub d1: f64,
}

impl CubicHermite {
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let value = h00 * self.y0 + h10 * self.d0 + h01 * self.y1 + h11 * self.d1;
        let dh00 = 6.0 * t2 - 6.0 * t;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = -6.0 * t2 + 6.0 * t;
        let dh11 = 3.0 * t2 - 2.0 * t;
        let slope = dh00 * self.y0 + dh10 * self.d0 + dh01 * self.y1 + dh11 * self.d1;
        (value, slope)
    }
}

/// Which Cartesian component of a [`PolarHermite`] curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarComponent {
    Cos,
    Sin,
}

/// Planar curve `exp(L(t)) · (cos Θ(t), sin Θ(t))` with Hermite `L` and `Θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarHermite {
    pub log_radius: CubicHermite,
    pub angle: CubicHermite,
}

impl PolarHermite {
    fn eval(&self, component: PolarComponent, t: f64) -> (f64, f64) {
        let (l, dl) = self.log_radius.eval(t);
        let (th, dth) = self.angle.eval(t);
        let r = l.exp();
        let (s, c) = th.sin_cos();
        match component {
            PolarComponent::Cos => (r * c, r * (dl * c - s * dth)),
            PolarComponent::Sin => (r * s, r * (dl * s + c * dth)),
        }
    }
}

/// Panels in an antiderivative table.
const PRIMITIVE_PANELS: usize = 1024;

/// `t ↦ ∫₀ᵗ integrand`, tabulated at 1025 nodes on `[0, 1]` and completed
/// between nodes by Gauss–Legendre on the remaining piece.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    integrand: ScalarFn,
    kinks: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Primitive {
    pub fn new(integrand: ScalarFn) -> Self {
        let kinks = integrand.kinks();
        let mut cumulative = Vec::with_capacity(PRIMITIVE_PANELS + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..PRIMITIVE_PANELS {
            let a = i as f64 / PRIMITIVE_PANELS as f64;
            let b = (i + 1) as f64 / PRIMITIVE_PANELS as f64;
            acc += piece(&integrand, &kinks, a, b);
            cumulative.push(acc);
        }
        Self { integrand, kinks, cumulative }
    }

    pub fn integrand(&self) -> &ScalarFn {
        &self.integrand
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = PRIMITIVE_PANELS;
        let k = if t <= 0.0 {
            0
        } else if t >= 1.0 {
            n
        } else {
            ((t * n as f64).floor() as usize).min(n - 1)
        };
        let node = k as f64 / n as f64;
        self.cumulative[k] + piece(&self.integrand, &self.kinks, node, t)
    }
}

/// Signed Gauss–Legendre integral over `[a, b]`, split at interior kinks.
fn piece(f: &ScalarFn, kinks: &[f64], a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut total = 0.0;
    let mut left = lo;
    for &k in kinks.iter().filter(|&&k| k > lo && k < hi) {
        total += gauss_legendre(|s| f.eval(s), left, k);
        left = k;
    }
    total += gauss_legendre(|s| f.eval(s), left, hi);
    sign * total
}

/// Largest `|deriv(t) − D_h eval(t)|` over `grid_size` equispaced points of
/// `[0, 1]`, where `D_h` is the centered difference, or the second-order
/// one-sided difference where `t ± h` would leave `[0, 1]`.
pub fn derivative_check(f: &ScalarFn, grid_size: usize, h: f64) -> f64 {
    derivative_mismatch(|t| f.eval(t), |t| f.deriv(t), 0.0, 1.0, grid_size, h)
}

/// [`derivative_check`] for an arbitrary value/derivative pair on `[a, b]`.
pub fn derivative_mismatch<E, D>(eval: E, deriv: D, a: f64, b: f64, grid_size: usize, h: f64) -> f64
where
    E: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let n = grid_size.max(2) - 1;
    super::grid(a, b, n)
        .map(|t| {
            let fd = if t - h < a {
                (-3.0 * eval(t) + 4.0 * eval(t + h) - eval(t + 2.0 * h)) / (2.0 * h)
            } else if t + h > b {
                (3.0 * eval(t) - 4.0 * eval(t - h) + eval(t - 2.0 * h)) / (2.0 * h)
            } else {
                (eval(t + h) - eval(t - h)) / (2.0 * h)
            };
            (deriv(t) - fd).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn derivative_check_examples() {
        assert!(derivative_check(&ScalarFn::constant(3.0), 101, 1e-5) < 1e-9);
        let square = ScalarFn::polynomial(vec![0.0, 0.0, 1.0]);
        assert!(derivative_check(&square, 101, 1e-5) <= 1e-8);
    }

    #[test]
    fn derivative_check_catches_planted_error() {
        // t² paired with the wrong derivative 3t: |3t − 2t| peaks at t = 1
        let m = derivative_mismatch(|t| t * t, |t| 3.0 * t, 0.0, 1.0, 101, 1e-5);
        assert!((m - 1.0).abs() < 1e-6, "{m}");
    }

    #[test]
    fn every_family_passes_derivative_check() {
        let fns = [
            ScalarFn::affine(-2.0, 0.5),
            ScalarFn::sinusoid(1.5, 3, 0.2, -0.1),
            ScalarFn::polynomial(vec![1.0, -2.0, 0.5, 3.0]),
            ScalarFn::sinusoid(1.0, 2, 0.0, 0.0).primitive(),
            ScalarFn::Primitive(Arc::new(Primitive::new(ScalarFn::sinusoid(0.4, 5, 1.0, 0.3)))),
            ScalarFn::Sewn {
                curve: Arc::new(PolarHermite {
                    log_radius: CubicHermite { y0: 0.0, y1: 0.3, d0: 0.1, d1: -0.2 },
                    angle: CubicHermite { y0: 0.0, y1: 2.0, d0: 1.0, d1: 1.5 },
                }),
                component: PolarComponent::Sin,
            },
        ];
        for f in &fns {
            assert!(derivative_check(f, 101, 1e-5) < 1e-7, "{:?}", f.family());
        }
    }

    #[test]
    fn piecewise_linear_eval_and_slope() {
        let f = ScalarFn::piecewise_linear(vec![(0.0, 0.0), (0.5, 1.0), (1.0, -1.0)]).unwrap();
        assert_eq!(f.eval(0.25), 0.5);
        assert_eq!(f.eval(0.75), 0.0);
        assert_eq!(f.deriv(0.25), 2.0);
        assert_eq!(f.deriv(0.5), -4.0);
        assert_eq!(f.eval(2.0), -1.0);
        assert_eq!(f.kinks(), vec![0.0, 0.5, 1.0]);
        assert!(ScalarFn::piecewise_linear(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn primitive_of_piecewise_linear_is_exact() {
        let f = ScalarFn::piecewise_linear(vec![(0.0, 0.0), (0.3, 1.0), (1.0, 0.0)]).unwrap();
        let big = f.primitive();
        assert!((big.eval(1.0) - 0.5).abs() < 1e-15);
        assert!((big.eval(0.3) - 0.15).abs() < 1e-15);
        assert_eq!(big.deriv(0.2), f.eval(0.2));
    }

    #[test]
    fn closed_form_primitives_match_tables() {
        let fns = [
            ScalarFn::constant(-1.5),
            ScalarFn::affine(2.0, -0.25),
            ScalarFn::polynomial(vec![0.5, -1.0, 3.0, 0.25]),
            ScalarFn::sinusoid(1.3, 3, 0.7, -0.2),
            ScalarFn::sinusoid(0.4, 0, 1.1, 0.5),
            ScalarFn::Sum(vec![ScalarFn::affine(1.0, 0.0), ScalarFn::sinusoid(1.0, 1, 0.0, 0.0).scaled(-2.0)]),
        ];
        for f in &fns {
            let closed = f.primitive();
            let table = ScalarFn::Primitive(Arc::new(Primitive::new(f.clone())));
            assert_ne!(closed.family(), Family::Primitive);
            for t in [0.0, 0.2, 0.5, 0.93, 1.0] {
                assert!((closed.eval(t) - table.eval(t)).abs() < 1e-14, "{f:?} at {t}");
                assert!((closed.deriv(t) - f.eval(t)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn linear_combination_simplifies() {
        let f = ScalarFn::sinusoid(1.0, 1, 0.0, 0.0);
        assert_eq!(ScalarFn::linear_combination(&[(1.0, &f), (0.0, &f)]), f);
        assert_eq!(ScalarFn::linear_combination(&[(0.0, &f)]), ScalarFn::Constant(0.0));
        assert_eq!(f.scaled(2.0).eval(0.5), 2.0);
    }
}
