//! Combinatorial engine for Feynman categories built on graphs of corollas.
//!
//! The crate models aggregates of corollas and their graph morphisms,
//! restriction presentations of the standard operad-like categories,
//! finite-set-valued decorations, decorated categories, pushforwards as
//! truncated colimits over comma categories, and the surface topology of the
//! ribbon-graph examples.  Everything is exact and desk-scale: hom-sets are
//! enumerated, colimits are computed by union-find over bounded comma
//! categories, and the structural theorems are verified by checkers rather
//! than assumed.

pub mod canonical;
pub mod category;
pub mod checks;
pub mod decorate;
pub mod error;
pub mod graph;
pub mod kan;
pub mod sample;
pub mod setops;

pub use error::{CatError, GraphError, KanError, OpError};
pub use graph::{Aggregate, Corolla, GhostGraph, GraphMorphism};
