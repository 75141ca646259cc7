//! Computable Hilbert evolution algebras.
//!
//! An algebra is given by its natural orthonormal basis `{e_i}` and the
//! structural constants `e_i² = Σ_k ω_ik e_k` (distinct basis elements
//! multiply to zero). Those constants form a weighted digraph on ℕ, possibly
//! infinite and not locally finite. This crate does exact arithmetic in the
//! algebra, budgeted graph queries, ℓ² operator bounds, and nil/nilpotency
//! decisions backed by checkable witnesses.

pub mod algebra;
pub mod error;
pub mod families;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod nilpotency;
pub mod operator;
pub mod scalar;
pub mod structure;

pub use algebra::{ApproxElement, BasisTransform, Element, Expansion};
pub use error::{Error, Result};
pub use families::{build_family, FamilySpec};
pub use scalar::{Scalar, ScalarMode};
pub use structure::{Depth, EvolutionStructure, FamilyMeta, Row, Universe, VertexId};
