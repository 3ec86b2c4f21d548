//! Assemblies as structured text.
//!
//! ```toml
//! [assembly]
//! standard = true            # start from the four-block decomposition
//!
//! [[assembly.blocks]]
//! kind = "c"
//! id = "C1"
//! profile = "const_2_3"      # a name under [profiles]
//! correction = [0.0, 1.0]
//!
//! [[assembly.gluings]]
//! a = "B1.2"                 # block id, boundary torus index
//! b = "B2.0"
//! matrix = [[1, 0], [0, -1]] # x_b = matrix · x_a
//! ```

use std::collections::BTreeMap;

use fluxknot_core::assembly::{standard_decomposition, Assembly, Block, BlockEntry, BoundaryRef, Gluing};
use fluxknot_core::blocks::{BlockA, BlockB, Collar};
use fluxknot_core::invariants::CohomologyClass;
use serde::{Deserialize, Serialize};

use crate::config::ConfigError;
use crate::spec::{FnSpec, ProfileSpec};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblySpec {
    #[serde(default)]
    pub standard: bool,
    #[serde(default)]
    pub blocks: Vec<BlockSpec>,
    #[serde(default)]
    pub gluings: Vec<GluingSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollarSpec {
    pub phi: FnSpec,
    pub h: FnSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockSpec {
    A {
        id: String,
        phi: FnSpec,
        radius: f64,
        #[serde(default)]
        unknotted: bool,
    },
    B {
        id: String,
        collars: Vec<CollarSpec>,
    },
    C {
        id: String,
        profile: Option<String>,
        #[serde(default)]
        correction: [f64; 2],
        #[serde(default)]
        unknotted: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingSpec {
    pub a: String,
    pub b: String,
    pub matrix: [[i64; 2]; 2],
}

fn parse_ref(s: &str) -> Option<BoundaryRef> {
    let (block, torus) = s.rsplit_once('.')?;
    Some(BoundaryRef::new(block, torus.parse().ok()?))
}

fn config_err(message: String) -> ConfigError {
    ConfigError::Invalid { field: "assembly".into(), message }
}

impl AssemblySpec {
    pub fn check_references(&self, profiles: &BTreeMap<String, ProfileSpec>) -> Result<(), ConfigError> {
        for b in &self.blocks {
            if let BlockSpec::C { profile: Some(name), id, .. } = b {
                if !profiles.contains_key(name) {
                    return Err(config_err(format!("block {id} refers to unknown profile {name:?}")));
                }
            }
        }
        for g in &self.gluings {
            for r in [&g.a, &g.b] {
                if parse_ref(r).is_none() {
                    return Err(config_err(format!("boundary reference {r:?} is not of the form <block>.<torus>")));
                }
            }
        }
        Ok(())
    }

    /// Builds the assembly. Block construction errors are computation errors.
    pub fn build(&self, profiles: &BTreeMap<String, ProfileSpec>) -> anyhow::Result<Assembly> {
        let mut out = if self.standard { standard_decomposition()? } else { Assembly::default() };
        for spec in &self.blocks {
            let entry = match spec {
                BlockSpec::A { id, phi, radius, unknotted } => {
                    let e = BlockEntry::new(id.clone(), Block::A(BlockA::new(phi.build()?, *radius)?));
                    if *unknotted { e.unknotted() } else { e }
                }
                BlockSpec::B { id, collars } => {
                    let built = collars
                        .iter()
                        .map(|c| Ok(Collar { phi: c.phi.build()?, h: c.h.build()? }))
                        .collect::<fluxknot_core::Result<Vec<_>>>()?;
                    let collars: [Collar; 3] = built
                        .try_into()
                        .map_err(|v: Vec<Collar>| anyhow::anyhow!("block {id} has {} collars, expected 3", v.len()))?;
                    BlockEntry::new(id.clone(), Block::B(BlockB::new(collars)?))
                }
                BlockSpec::C { id, profile, correction, unknotted } => {
                    let p = profile.as_ref().map(|name| profiles[name].build()).transpose()?;
                    let e = BlockEntry::new(id.clone(), Block::C(p))
                        .with_correction(CohomologyClass::new(correction[0], correction[1]));
                    if *unknotted { e.unknotted() } else { e }
                }
            };
            out.blocks.push(entry);
        }
        for g in &self.gluings {
            // references were checked when the config was loaded
            let (a, b) = (parse_ref(&g.a).expect("checked"), parse_ref(&g.b).expect("checked"));
            out.gluings.push(Gluing { a, b, matrix: g.matrix });
        }
        Ok(out)
    }

    /// Fully explicit spec of an assembly (thickened tori are written without
    /// their profile). `None` if some function has no closed form.
    pub fn from_assembly(a: &Assembly) -> Option<Self> {
        let blocks = a
            .blocks
            .iter()
            .map(|e| {
                Some(match &e.block {
                    Block::A(b) => BlockSpec::A {
                        id: e.id.clone(),
                        phi: FnSpec::from_scalar(b.phi())?,
                        radius: b.radius(),
                        unknotted: e.unknotted,
                    },
                    Block::B(b) => BlockSpec::B {
                        id: e.id.clone(),
                        collars: b
                            .collars()
                            .iter()
                            .map(|c| Some(CollarSpec { phi: FnSpec::from_scalar(&c.phi)?, h: FnSpec::from_scalar(&c.h)? }))
                            .collect::<Option<_>>()?,
                    },
                    Block::C(_) => BlockSpec::C {
                        id: e.id.clone(),
                        profile: None,
                        correction: [e.correction.n1, e.correction.n2],
                        unknotted: e.unknotted,
                    },
                })
            })
            .collect::<Option<_>>()?;
        let gluings = a
            .gluings
            .iter()
            .map(|g| GluingSpec { a: g.a.to_string(), b: g.b.to_string(), matrix: g.matrix })
            .collect();
        Some(Self { standard: false, blocks, gluings })
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        #[derive(Serialize)]
        struct Wrap<'a> {
            assembly: &'a AssemblySpec,
        }
        Ok(toml::to_string(&Wrap { assembly: self })?)
    }
}
