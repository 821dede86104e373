//! Tautological classes on moduli spaces of stable curves as exact linear
//! combinations of decorated dual graphs.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`] and [`canonical`]: decorated stable graphs, validity, and
//!   canonical forms up to isomorphism.
//! * [`formal_sum`] and [`gwi`]: ℚ-linear combinations of graphs and their
//!   text representation.
//! * [`operators`]: the invariance operators 𝔯_l.
//! * [`relations`]: rewriting of ψ and κ classes, WDVV relations, imported
//!   relations and normal forms.
//! * [`solver`]: enumeration of classes, the invariance linear system and its
//!   nullspace.

pub mod canonical;
pub mod error;
pub mod formal_sum;
pub mod graph;
pub mod gwi;
pub mod linalg;
pub mod operators;
pub mod relations;
pub mod solver;
pub mod strata;

pub use canonical::{automorphism_count, canonicalize, is_isomorphic, CanonicalForm};
pub use error::TautError;
pub use formal_sum::{symmetrize, FormalSum, LinearForm, SymbolicSum};
pub use graph::{DecoratedGraph, HalfEdge, Label, Vertex};

/// Exact rational numbers; every coefficient in the crate is one of these.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
