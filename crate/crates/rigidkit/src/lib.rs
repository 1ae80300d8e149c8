//! Combinatorial rigidity toolkit for periodic and cone frameworks.
//!
//! The input everywhere is a *colored graph*: a finite directed multigraph
//! whose edges carry elements of `Z^2` (fixed-lattice periodic frameworks) or
//! `Z/kZ` (cone frameworks).  The crate decides generic rigidity, extracts
//! maximum independent edge sets, and computes rigid components for both
//! families, using parallel (2, l) pebble games combined with a linear-time
//! test for triviality of the group image of the cycle map.  For `Z/3Z` a
//! faster route goes through the threefold development of the colored graph.
//!
//! Every algorithmic path is cross-checked against a brute-force definitional
//! oracle (`oracle` module) on desk-scale inputs.

pub mod cone;
pub mod develop;
pub mod fileformat;
pub mod gamma;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod pebble;
pub mod ross;

pub use graph::{
    Color, ColoredGraph, Component, ComponentReport, EdgeId, EdgeSubset, Group, VertexId,
};

/// Top-level precondition failures of the algorithm entry points.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("algorithm requires a {expected} colored graph (got {found:?})")]
    GroupMismatch {
        expected: &'static str,
        found: Group,
    },
}
