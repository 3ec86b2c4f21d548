//! Manifolds assembled from blocks glued along boundary tori.
//!
//! Boundary tori are numbered per block: a solid torus has torus 0, a pants
//! block has tori 0..3 (one per collar), a thickened torus has torus 0 at
//! `t = 0` and torus 1 at `t = 1`. A gluing `x_b = M x_a` identifies torus `a`
//! with torus `b`; the boundary jets, each taken along its own outward normal,
//! must then satisfy `jet_b = reverse(M^{-T} jet_a)`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::blocks::{BlockA, BlockB, BoundaryJet, Collar, LutzPair, Profile, TorusMatrix};
use crate::invariants::{CohomologyClass, Normalization, Numerics};
use crate::math::ScalarFn;
use crate::{Error, Result};

/// Jet agreement required across a gluing.
pub const JET_TOL: f64 = 1e-8;
/// Boundary jets with `|(p, q)|` below this carry no contact data.
const DEGENERATE_JET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    A(BlockA),
    B(BlockB),
    /// A thickened torus; the profile may be filled in later.
    C(Option<Profile>),
}

impl Block {
    pub fn boundary_count(&self) -> usize {
        match self {
            Block::A(_) => 1,
            Block::B(_) => 3,
            Block::C(_) => 2,
        }
    }

    pub fn kind(&self) -> char {
        match self {
            Block::A(_) => 'A',
            Block::B(_) => 'B',
            Block::C(_) => 'C',
        }
    }

    /// Outward jet at boundary torus `torus`; `None` when out of range or when a
    /// thickened torus has no profile.
    pub fn boundary_jet(&self, torus: usize) -> Option<BoundaryJet> {
        match self {
            Block::A(a) if torus == 0 => Some(a.boundary_jet()),
            Block::B(b) => b.boundary_jet(torus),
            Block::C(Some(p)) if torus < 2 => {
                let field = crate::blocks::block_c_field(p);
                let pair = field.primitive_pair();
                let jet = BoundaryJet::of_pair(&pair, torus as f64);
                Some(if torus == 0 { jet.reversed() } else { jet })
            }
            _ => None,
        }
    }

    /// Whether the contact data is Lutz-valid on a collar of `torus`.
    fn boundary_is_lutz(&self, torus: usize) -> bool {
        match self {
            Block::A(a) => a.boundary_lutz().is_valid,
            Block::B(b) => b.collars()[torus].lutz().is_valid,
            Block::C(Some(p)) => {
                let pair: LutzPair = crate::blocks::block_c_field(p).primitive_pair();
                let (lo, hi) = if torus == 0 { (0.0, 0.1) } else { (0.9, 1.0) };
                crate::blocks::lutz_valid_on(&pair, lo, hi).is_valid
            }
            Block::C(None) => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockEntry {
    pub id: String,
    pub block: Block,
    /// Certificate that the block is an unknotted solid or thickened torus.
    pub unknotted: bool,
    /// Correction class `(M₁, M₂)`; used by thickened tori only.
    pub correction: CohomologyClass,
}

impl BlockEntry {
    pub fn new(id: impl Into<String>, block: Block) -> Self {
        Self { id: id.into(), block, unknotted: false, correction: CohomologyClass::ZERO }
    }

    pub fn unknotted(self) -> Self {
        Self { unknotted: true, ..self }
    }

    pub fn with_correction(self, correction: CohomologyClass) -> Self {
        Self { correction, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryRef {
    pub block: String,
    pub torus: usize,
}

impl BoundaryRef {
    pub fn new(block: impl Into<String>, torus: usize) -> Self {
        Self { block: block.into(), torus }
    }
}

impl core::fmt::Display for BoundaryRef {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}.{}", self.block, self.torus)
    }
}

/// Identification `x_b = matrix · x_a` of two boundary tori. The matrix is kept
/// raw so that bad determinants can be reported rather than rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Gluing {
    pub a: BoundaryRef,
    pub b: BoundaryRef,
    pub matrix: [[i64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assembly {
    pub blocks: Vec<BlockEntry>,
    pub gluings: Vec<Gluing>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateBlockId(String),
    UnknownBlock { gluing: usize, block: String },
    NoSuchTorus { gluing: usize, boundary: BoundaryRef },
    TorusReused { boundary: BoundaryRef },
    SelfGluing { gluing: usize },
    Determinant { gluing: usize, det: i64 },
    DegenerateBoundary { boundary: BoundaryRef },
    NotLutz { boundary: BoundaryRef },
    JetMismatch { gluing: usize, max_diff: f64 },
    /// Wronskian signs that no sewing collar can connect.
    Sewability { gluing: usize, wronskian_a: f64, wronskian_b: f64 },
}

/// Bookkeeping of a valid assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblySummary {
    pub block_count: usize,
    pub gluing_count: usize,
    pub external: Vec<BoundaryRef>,
    /// Every block is a circle bundle over a surface with boundary, so each
    /// contributes 0, and each glued torus subtracts 0.
    pub euler_characteristic: i64,
}

impl Assembly {
    pub fn block(&self, id: &str) -> Option<&BlockEntry> {
        self.blocks.iter().find(|b| b.id == id)
    }

    /// Boundary tori not used by any gluing, in block order.
    pub fn external_boundaries(&self) -> Vec<BoundaryRef> {
        let mut out = Vec::new();
        for entry in &self.blocks {
            for torus in 0..entry.block.boundary_count() {
                let r = BoundaryRef::new(entry.id.clone(), torus);
                if !self.gluings.iter().any(|g| g.a == r || g.b == r) {
                    out.push(r);
                }
            }
        }
        out
    }

    /// The same assembly with every gluing matrix `M` replaced by `M · m`.
    pub fn retwisted(&self, m: &TorusMatrix) -> Assembly {
        let gluings = self
            .gluings
            .iter()
            .map(|g| {
                let a = g.matrix;
                let b = m.entries();
                let mut out = [[0i64; 2]; 2];
                for (i, row) in out.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
                    }
                }
                Gluing { matrix: out, ..g.clone() }
            })
            .collect();
        Assembly { blocks: self.blocks.clone(), gluings }
    }
}

fn resolve<'a>(a: &'a Assembly, gluing: usize, r: &BoundaryRef, out: &mut Vec<Violation>) -> Option<&'a Block> {
    let Some(entry) = a.block(&r.block) else {
        out.push(Violation::UnknownBlock { gluing, block: r.block.clone() });
        return None;
    };
    if r.torus >= entry.block.boundary_count() {
        out.push(Violation::NoSuchTorus { gluing, boundary: r.clone() });
        return None;
    }
    Some(&entry.block)
}

/// Checks boundary matching, determinants, Lutz data on each glued collar, jet
/// agreement and Wronskian sign compatibility. Never fails; violations are
/// returned as data.
pub fn validate_assembly(a: &Assembly) -> core::result::Result<AssemblySummary, Vec<Violation>> {
    let mut out = Vec::new();
    for (i, e) in a.blocks.iter().enumerate() {
        if a.blocks[..i].iter().any(|o| o.id == e.id) {
            out.push(Violation::DuplicateBlockId(e.id.clone()));
        }
    }
    let mut used: Vec<&BoundaryRef> = Vec::new();
    for (gi, g) in a.gluings.iter().enumerate() {
        if g.a == g.b {
            out.push(Violation::SelfGluing { gluing: gi });
        }
        for r in [&g.a, &g.b] {
            if used.contains(&r) && !out.iter().any(|v| matches!(v, Violation::TorusReused { boundary } if boundary == r)) {
                out.push(Violation::TorusReused { boundary: r.clone() });
            }
            used.push(r);
        }
        let det = g.matrix[0][0] * g.matrix[1][1] - g.matrix[0][1] * g.matrix[1][0];
        let matrix = match TorusMatrix::new(g.matrix) {
            Ok(m) => Some(m),
            Err(_) => {
                out.push(Violation::Determinant { gluing: gi, det });
                None
            }
        };
        let (Some(block_a), Some(block_b)) = (resolve(a, gi, &g.a, &mut out), resolve(a, gi, &g.b, &mut out)) else {
            continue;
        };
        for (block, r) in [(block_a, &g.a), (block_b, &g.b)] {
            if !block.boundary_is_lutz(r.torus) {
                out.push(Violation::NotLutz { boundary: r.clone() });
            }
        }
        let (Some(jet_a), Some(jet_b)) = (block_a.boundary_jet(g.a.torus), block_b.boundary_jet(g.b.torus)) else {
            continue;
        };
        let mut degenerate = false;
        for (jet, r) in [(&jet_a, &g.a), (&jet_b, &g.b)] {
            if jet.magnitude() <= DEGENERATE_JET {
                out.push(Violation::DegenerateBoundary { boundary: r.clone() });
                degenerate = true;
            }
        }
        let Some(m) = matrix else { continue };
        if degenerate {
            continue;
        }
        let expected = jet_a.glued_across(&m);
        let max_diff = expected.max_abs_diff(&jet_b);
        if max_diff > JET_TOL {
            out.push(Violation::JetMismatch { gluing: gi, max_diff });
        }
        let (wa, wb) = (jet_a.wronskian(), jet_b.wronskian());
        if !(expected.wronskian() * wb > 0.0) {
            out.push(Violation::Sewability { gluing: gi, wronskian_a: wa, wronskian_b: wb });
        }
    }
    if out.is_empty() {
        Ok(AssemblySummary {
            block_count: a.blocks.len(),
            gluing_count: a.gluings.len(),
            external: a.external_boundaries(),
            euler_characteristic: 0,
        })
    } else {
        Err(out)
    }
}

fn collar(phi: ScalarFn, h: ScalarFn) -> Collar {
    Collar { h, phi }
}

/// The solid-torus profile `φ = 2 − r²/2` on `R = 1`.
fn standard_solid_torus() -> Result<BlockA> {
    BlockA::new(ScalarFn::polynomial([2.0, 0.0, -0.5]), 1.0)
}

/// Four blocks `B₁, B₂, A₁, A₂` whose union has two external tori:
/// `B₁` keeps two external tori, its third is glued to `B₂`, whose remaining
/// tori are capped by the solid tori `A₁` and `A₂` (the latter unknotted, its
/// meridian bounding a disk). All gluings use `diag(1, −1)`.
pub fn standard_decomposition() -> Result<Assembly> {
    let up = || ScalarFn::affine(1.0, 1.0);
    let one = || ScalarFn::constant(1.0);
    // matches the solid-torus jet (1.5, 1, −1, 2) seen across diag(1, −1)
    let cap = || collar(ScalarFn::affine(1.0, 1.5), ScalarFn::affine(2.0, -1.0));
    let b1 = BlockB::new([collar(one(), up()), collar(one(), up()), collar(one(), ScalarFn::affine(1.0, -1.0))])?;
    let b2 = BlockB::new([collar(one(), up()), cap(), cap()])?;
    let flip = TorusMatrix::FLIP.entries();
    Ok(Assembly {
        blocks: alloc::vec![
            BlockEntry::new("B1", Block::B(b1)),
            BlockEntry::new("B2", Block::B(b2)),
            BlockEntry::new("A1", Block::A(standard_solid_torus()?)),
            BlockEntry::new("A2", Block::A(standard_solid_torus()?)).unknotted(),
        ],
        gluings: alloc::vec![
            Gluing { a: BoundaryRef::new("B1", 2), b: BoundaryRef::new("B2", 0), matrix: flip },
            Gluing { a: BoundaryRef::new("A1", 0), b: BoundaryRef::new("B2", 1), matrix: flip },
            Gluing { a: BoundaryRef::new("A2", 0), b: BoundaryRef::new("B2", 2), matrix: flip },
        ],
    })
}

/// Sum of thickened-torus helicities with each block's correction class.
/// Solid tori and pants blocks carry no interior term.
pub fn total_helicity(a: &Assembly) -> Result<f64> {
    let numerics = Numerics::default();
    let mut total = 0.0;
    for entry in &a.blocks {
        if let Block::C(profile) = &entry.block {
            let profile = profile
                .as_ref()
                .ok_or_else(|| Error::IncompleteAssembly(alloc::format!("block {} has no profile", entry.id)))?;
            total += numerics.helicity(profile, &entry.correction)?;
        }
    }
    Ok(total)
}

/// Side-by-side union; block ids must not clash.
pub fn disjoint_union(left: &Assembly, right: &Assembly) -> Result<Assembly> {
    if let Some(e) = right.blocks.iter().find(|e| left.block(&e.id).is_some()) {
        return Err(Error::InvalidArgument(alloc::format!("block id {} used on both sides", e.id)));
    }
    let mut out = left.clone();
    out.blocks.extend(right.blocks.iter().cloned());
    out.gluings.extend(right.gluings.iter().cloned());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub q: f64,
    pub helicity: f64,
    /// Probability normalization, `β = (1, 0)`.
    pub winding: f64,
    /// `4π ∫|f|`.
    pub wrappingness: f64,
    /// `4π ∫min(|f|, |g|)`.
    pub trunkenness: f64,
    /// `|a| ≥ |b| − |Q|`: the row lies outside the regime where the three
    /// other invariants are pinned.
    pub outside_constraint: bool,
}

/// The profile `(a, Q sin πt + b)`.
pub fn sine_profile(a: f64, b: f64, q: f64) -> Result<Profile> {
    Profile::new(ScalarFn::constant(a), ScalarFn::sinusoid(q, 1, 0.0, b))
}

pub fn helicity_sweep(a: f64, b: f64, qs: &[f64], correction: &CohomologyClass) -> Result<Vec<SweepRow>> {
    if a == 0.0 || b == 0.0 {
        return Err(Error::InvalidArgument("sweep needs a != 0 and b != 0".into()));
    }
    qs.iter().map(|&q| sweep_row(a, b, q, correction)).collect()
}

pub fn sweep_row(a: f64, b: f64, q: f64, correction: &CohomologyClass) -> Result<SweepRow> {
    let numerics = Numerics::default();
    let p = sine_profile(a, b, q)?;
    Ok(SweepRow {
        q,
        helicity: numerics.helicity(&p, correction)?,
        winding: numerics.winding(&p, &CohomologyClass::FIBER, Normalization::Probability)?,
        wrappingness: numerics.wrappingness(&p, Normalization::Lebesgue)?,
        trunkenness: numerics.trunkenness(&p, Normalization::Lebesgue)?,
        outside_constraint: a.abs() >= b.abs() - q.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVerdict {
    /// Other invariants constant, helicity varies.
    IndependenceDemonstrated,
    /// Fewer than two distinct `Q` among the admissible rows.
    InsufficientVariation,
    AllRowsFlagged,
    /// Admissible rows exist but the spreads do not separate helicity.
    NotDemonstrated,
}

impl SweepVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVerdict::IndependenceDemonstrated => "independence demonstrated",
            SweepVerdict::InsufficientVariation => "insufficient variation",
            SweepVerdict::AllRowsFlagged => "all rows outside constraint",
            SweepVerdict::NotDemonstrated => "not demonstrated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpreads {
    pub helicity: f64,
    pub winding: f64,
    pub wrappingness: f64,
    pub trunkenness: f64,
    pub q: f64,
}

fn spread(rows: &[&SweepRow], key: impl Fn(&SweepRow) -> f64) -> f64 {
    let max = rows.iter().map(|r| key(r)).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| key(r)).fold(f64::INFINITY, f64::min);
    max - min
}

/// Max-minus-min of each column over the admissible rows.
pub fn sweep_spreads(rows: &[SweepRow]) -> Option<SweepSpreads> {
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| !r.outside_constraint).collect();
    if ok.is_empty() {
        return None;
    }
    Some(SweepSpreads {
        helicity: spread(&ok, |r| r.helicity),
        winding: spread(&ok, |r| r.winding),
        wrappingness: spread(&ok, |r| r.wrappingness),
        trunkenness: spread(&ok, |r| r.trunkenness),
        q: spread(&ok, |r| r.q),
    })
}

pub fn sweep_verdict(rows: &[SweepRow]) -> SweepVerdict {
    let Some(s) = sweep_spreads(rows) else {
        return SweepVerdict::AllRowsFlagged;
    };
    if s.q == 0.0 {
        return SweepVerdict::InsufficientVariation;
    }
    let pinned = s.winding <= 1e-9 && s.wrappingness <= 1e-9 && s.trunkenness <= 1e-9;
    if pinned && s.helicity >= s.q * 1e-3 {
        SweepVerdict::IndependenceDemonstrated
    } else {
        SweepVerdict::NotDemonstrated
    }
}
