//! Experiment configuration files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::assembly_io::AssemblySpec;
use crate::spec::{MeasureConfig, NormalizationSpec, ProfileSpec};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("`{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Named profiles, processed in name order.
    #[serde(default)]
    pub profiles: BTreeMap<String, ProfileSpec>,
    #[serde(default)]
    pub measure: MeasureConfig,
    /// Only the fibration by fibers `{x₁ = θ}` is supported.
    #[serde(default = "default_fibration")]
    pub fibration: String,
    /// Normalization of the closed-form invariants.
    #[serde(default)]
    pub normalization: NormalizationSpec,
    pub mc: Option<McConfig>,
    pub sweep: Option<SweepConfig>,
    pub sew: Option<SewConfig>,
    pub assembly: Option<AssemblySpec>,
    pub output: Option<PathBuf>,
}

fn default_fibration() -> String {
    "x1".into()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub epsilon: f64,
    pub n: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_theta_grid")]
    pub theta_grid: usize,
    /// Profiles to estimate; all of them when absent.
    pub profiles: Option<Vec<String>>,
    /// Fiber used for the convergence table.
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_epsilons")]
    pub convergence_epsilons: Vec<f64>,
    /// Sample counts for the convergence table; `[n]` when absent.
    pub convergence_n: Option<Vec<u64>>,
}

fn default_theta_grid() -> usize {
    16
}

fn default_theta() -> f64 {
    1.0
}

fn default_epsilons() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub a: f64,
    pub b: f64,
    pub q: Vec<f64>,
    /// Held fixed across the sweep; a zero `M₂` makes every helicity vanish.
    #[serde(default = "default_sweep_correction")]
    pub correction: [f64; 2],
}

fn default_sweep_correction() -> [f64; 2] {
    [0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SewConfig {
    /// Jet `(p, q, p′, q′)` at `t = 0`.
    pub left: [f64; 4],
    /// Jet at `t = 1`.
    pub right: [f64; 4],
    #[serde(default)]
    pub extra_turns: u32,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    201
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.fibration != "x1" {
            return Err(invalid("fibration", format!("unsupported fibration {:?}, expected \"x1\"", self.fibration)));
        }
        if let Some(mc) = &self.mc {
            if !(mc.epsilon > 0.0 && mc.epsilon <= 1e-2) {
                return Err(invalid("mc.epsilon", format!("{} outside (0, 0.01]", mc.epsilon)));
            }
            if mc.n < 1000 {
                return Err(invalid("mc.n", format!("{} below 1000", mc.n)));
            }
            if mc.theta_grid < 8 {
                return Err(invalid("mc.theta_grid", format!("{} below 8", mc.theta_grid)));
            }
            for name in mc.profiles.iter().flatten() {
                if !self.profiles.contains_key(name) {
                    return Err(invalid("mc.profiles", format!("unknown profile {name:?}")));
                }
            }
            let eps = &mc.convergence_epsilons;
            if eps.is_empty() || eps.windows(2).any(|w| !(w[0] > w[1])) {
                return Err(invalid("mc.convergence_epsilons", "must be non-empty and strictly descending"));
            }
            if let Some(&e) = eps.iter().find(|&&e| !(e > 0.0 && e <= 1e-2)) {
                return Err(invalid("mc.convergence_epsilons", format!("{e} outside (0, 0.01]")));
            }
            if let Some(ns) = &mc.convergence_n {
                if ns.is_empty() || ns.iter().any(|&n| n < 1000) {
                    return Err(invalid("mc.convergence_n", "must be non-empty with every n >= 1000"));
                }
            }
        }
        if let Some(s) = &self.sweep {
            if s.a == 0.0 || s.b == 0.0 {
                return Err(invalid("sweep", "a and b must be nonzero"));
            }
            if s.q.is_empty() {
                return Err(invalid("sweep.q", "empty list"));
            }
        }
        if let Some(s) = &self.sew {
            if s.samples < 2 {
                return Err(invalid("sew.samples", "need at least 2 samples"));
            }
        }
        if let Some(a) = &self.assembly {
            a.check_references(&self.profiles)?;
        }
        Ok(())
    }

    /// Profiles the Monte Carlo commands run on.
    pub fn mc_profiles(&self) -> Vec<String> {
        match self.mc.as_ref().and_then(|m| m.profiles.clone()) {
            Some(list) => list,
            None => self.profiles.keys().cloned().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[profiles.const_2_3]
f = { family = "constant", value = 2.0 }
g = { family = "constant", value = 3.0 }

[mc]
epsilon = 1e-3
n = 10000
"#;

    #[test]
    fn parses_and_defaults() {
        let c = ExperimentConfig::parse(BASE).unwrap();
        assert_eq!(c.fibration, "x1");
        let mc = c.mc.unwrap();
        assert_eq!(mc.theta_grid, 16);
        assert_eq!(mc.convergence_epsilons, vec![1e-2, 1e-3, 1e-4]);
        assert!(ExperimentConfig::parse("").unwrap().profiles.is_empty());
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = ExperimentConfig::parse("[profiles.x]\nf = { family = \"constant\" }\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn range_checks_name_the_field() {
        let bad = BASE.replace("epsilon = 1e-3", "epsilon = 0.5");
        let msg = ExperimentConfig::parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("mc.epsilon"), "{msg}");
        let bad = format!("{BASE}profiles = [\"missing\"]\n");
        let msg = ExperimentConfig::parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("missing"), "{msg}");
        let msg = ExperimentConfig::parse("fibration = \"x2\"\n").unwrap_err().to_string();
        assert!(msg.contains("fibration"), "{msg}");
        let msg = ExperimentConfig::parse("[sweep]\na = 0.0\nb = 1.0\nq = [1.0]\n").unwrap_err().to_string();
        assert!(msg.contains("sweep"), "{msg}");
    }
}
