//! Exact invariants of graph C*-algebras and Leavitt path algebras.
//!
//! The crate computes K-theory through Smith normal form, works with the
//! graph monoid and the algebra of compact-open subsets of the boundary path
//! space, applies graph moves, and checks or searches matrix-equivalence
//! certificates. Every computation is exact integer arithmetic.

pub mod boundary;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod ktheory;
pub mod matrix;
pub mod monoid;
pub mod moves;
pub mod snf;

pub use error::{Error, Result};
pub use graph::{parse_graph, Edge, ExtNat, Graph, StableMatrix, VertexClass};
pub use ktheory::{coker_class, h0_of_graph, k0_of_graph, pointed_compare, CokerClass, K0Data, PointedComparison};
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SnfResult};
