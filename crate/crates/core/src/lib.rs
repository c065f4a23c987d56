//! Splice diagrams of integral homology sphere singularity links.
//!
//! The crate validates splice diagrams, converts between splice diagrams and
//! plumbing (resolution) graphs, analyses the semigroup condition, writes
//! down splice-type equations and computes the standard numerical
//! invariants of the link and its smoothings. Everything is exact: weights
//! and matrix entries are arbitrary-precision integers and polynomial
//! coefficients are rationals.

pub mod convert;
pub mod diagram;
pub mod equation;
pub mod error;
pub mod format;
pub mod invariant;
pub mod random;
pub mod semigroup;

pub use convert::{IntegerMatrix, MaximalSpliceDiagram, ResolutionGraph};
pub use diagram::{RootedWeightedTree, SpliceDiagram, ValidationReport, VertexId};
pub use error::{Error, Result};
pub use semigroup::{Monomial, NumericSemigroup};
