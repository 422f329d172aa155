//! Verification toolkit for a temporal deontic logic of agency.
//!
//! The crate model-checks formulas over finite relational frames under two
//! semantics for obligation: a neutral one with explicit ideal worlds, and a
//! utilitarian one driven by dominance between choices. It validates every
//! frame condition, converts neutral models into utilitarian ones, checks
//! Hilbert derivations, and analyzes when binary utilities make every
//! obligation vacuous.
//!
//! The crate is `no_std` and only needs `alloc`; file formats and the
//! command-line front end live in the `tds` crate.
#![no_std]

extern crate alloc;

pub mod ctd;
pub mod dominance;
pub mod framecheck;
pub mod gen;
pub mod model;
pub mod proofcheck;
pub mod semantics;
pub mod soundness;
pub mod syntax;
pub mod transform;

/// A set of worlds, indexed by [`model::WorldId`].
pub type WorldSet = fixedbitset::FixedBitSet;

pub use model::{CellRef, Frame, FrameParts, Model, MomentId, NeutralModel, UtilModel, WorldId};
pub use syntax::{parse, print, AgentId, Formula};
