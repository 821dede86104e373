//! Relations among tautological classes and the normal forms they define.
//!
//! Decorated graphs are first rewritten into combinations of undecorated
//! strata ([`rewrite`]). The remaining relations among strata come from WDVV
//! at genus-0 vertices ([`wdvv`]) and from relations stored in a [`Registry`],
//! placed at vertices of larger graphs ([`induce`]).

pub mod induce;
pub mod registry;
pub mod rewrite;
pub mod wdvv;

pub use registry::{AmbientBasis, AmbientKey, NormalForm, Provenance, Registry, StoredRelation};
pub use rewrite::{reduce, reduce_sum};
