//! Serializable descriptions of scalar functions, profiles and measures.

use fluxknot_core::blocks::Profile;
use fluxknot_core::flux::{DiracOrbit, MeasureSpec};
use fluxknot_core::invariants::{CohomologyClass, Normalization};
use fluxknot_core::math::ScalarFn;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnSpec {
    Constant {
        value: f64,
    },
    Affine {
        slope: f64,
        intercept: f64,
    },
    /// `amplitude · sin(π · frequency · t + phase) + offset`.
    Sinusoid {
        amplitude: f64,
        frequency: i32,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Ascending coefficients.
    Polynomial {
        coefficients: Vec<f64>,
    },
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
    Sum {
        terms: Vec<FnSpec>,
    },
    Scaled {
        factor: f64,
        of: Box<FnSpec>,
    },
}

impl FnSpec {
    pub fn build(&self) -> fluxknot_core::Result<ScalarFn> {
        Ok(match self {
            FnSpec::Constant { value } => ScalarFn::constant(*value),
            FnSpec::Affine { slope, intercept } => ScalarFn::affine(*slope, *intercept),
            FnSpec::Sinusoid { amplitude, frequency, phase, offset } => {
                ScalarFn::sinusoid(*amplitude, *frequency, *phase, *offset)
            }
            FnSpec::Polynomial { coefficients } => ScalarFn::polynomial(coefficients.clone()),
            FnSpec::PiecewiseLinear { knots } => {
                ScalarFn::piecewise_linear(knots.iter().map(|k| (k[0], k[1])).collect::<Vec<_>>())?
            }
            FnSpec::Sum { terms } => {
                let built = terms.iter().map(FnSpec::build).collect::<fluxknot_core::Result<Vec<_>>>()?;
                ScalarFn::Sum(built)
            }
            FnSpec::Scaled { factor, of } => of.build()?.scaled(*factor),
        })
    }

    /// The spec of a closed-form function; `None` for sewn curves and
    /// quadrature tables.
    pub fn from_scalar(f: &ScalarFn) -> Option<Self> {
        Some(match f {
            ScalarFn::Constant(value) => FnSpec::Constant { value: *value },
            ScalarFn::Affine { slope, intercept } => FnSpec::Affine { slope: *slope, intercept: *intercept },
            ScalarFn::Sinusoid { amplitude, frequency, phase, offset } => FnSpec::Sinusoid {
                amplitude: *amplitude,
                frequency: *frequency,
                phase: *phase,
                offset: *offset,
            },
            ScalarFn::Polynomial(c) => FnSpec::Polynomial { coefficients: c.clone() },
            ScalarFn::PiecewiseLinear(p) => FnSpec::PiecewiseLinear { knots: p.knots().iter().map(|k| [k.0, k.1]).collect() },
            ScalarFn::Sum(terms) => FnSpec::Sum { terms: terms.iter().map(Self::from_scalar).collect::<Option<_>>()? },
            ScalarFn::Scaled(factor, of) => FnSpec::Scaled { factor: *factor, of: Box::new(Self::from_scalar(of)?) },
            ScalarFn::Sewn { .. } | ScalarFn::Primitive(_) => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub f: FnSpec,
    pub g: FnSpec,
    /// Correction class `(M₁, M₂)` added to the helicity.
    #[serde(default)]
    pub correction: [f64; 2],
    /// Class paired with the field in the winding number.
    #[serde(default = "fiber_class")]
    pub beta: [f64; 2],
}

fn fiber_class() -> [f64; 2] {
    [1.0, 0.0]
}

impl ProfileSpec {
    pub fn build(&self) -> fluxknot_core::Result<Profile> {
        Profile::new(self.f.build()?, self.g.build()?)
    }

    pub fn correction(&self) -> CohomologyClass {
        CohomologyClass::new(self.correction[0], self.correction[1])
    }

    pub fn beta(&self) -> CohomologyClass {
        CohomologyClass::new(self.beta[0], self.beta[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationSpec {
    #[default]
    Probability,
    Lebesgue,
}

impl From<NormalizationSpec> for Normalization {
    fn from(n: NormalizationSpec) -> Self {
        match n {
            NormalizationSpec::Probability => Normalization::Probability,
            NormalizationSpec::Lebesgue => Normalization::Lebesgue,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    Volume {
        #[serde(default)]
        normalization: NormalizationSpec,
    },
    Dirac {
        p: i64,
        q: i64,
        #[serde(default = "half")]
        t0: f64,
    },
}

fn half() -> f64 {
    0.5
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig::Volume { normalization: NormalizationSpec::Probability }
    }
}

impl MeasureConfig {
    pub fn build(&self) -> fluxknot_core::Result<MeasureSpec> {
        Ok(match *self {
            MeasureConfig::Volume { normalization } => MeasureSpec::Volume(normalization.into()),
            MeasureConfig::Dirac { p, q, t0 } => MeasureSpec::DiracOrbit(DiracOrbit::new(p, q, t0)?),
        })
    }
}
