//! Symbolic workbench for systems of linear partial differential equations
//! with exact parameter arithmetic: involutive completion, compatibility
//! conditions, the associated resolutions, formal adjoints, and the
//! torsion/parametrizability analysis built on double dualization.

pub mod catalog;
pub mod combin;
pub mod diffop;
pub mod error;
pub mod field;
pub mod jets;
pub mod sequences;
pub mod duality;

pub use error::JanetError;
