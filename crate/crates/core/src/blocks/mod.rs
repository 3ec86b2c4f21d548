//! The three building blocks and the Lutz data that lets them be glued.
//!
//! Orientation conventions are fixed once: `Ω = dx₁∧dx₂∧dt` on the thickened
//! torus and `Ω = r·dr∧dθ∧dψ` on the solid torus. A field `X` is dual to a
//! 2-form `η` when `ι_X Ω = η`.

mod pants;
mod profile;
mod sew;
mod solid_torus;
mod torus;

pub use pants::{BlockB, Collar, COLLAR_RANGE};
pub use profile::{
    block_c_field, lutz_valid, lutz_valid_on, BlockC, BlockCField, LutzPair, LutzReport, Profile, WronskianSign,
    PROFILE_GRID,
};
pub use sew::{sew_lutz, Sewing};
pub use solid_torus::{block_a_field, BlockA, SolidTorusField};
pub use torus::{transform_torus, BoundaryJet, TorusMatrix, TorusTransform};
