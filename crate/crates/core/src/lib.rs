//! Exact desk-scale solvers for rooted folios, disjoint paths, vital linkages
//! and irrelevant-vertex reduction, with generators for the grid-and-gadget
//! lower-bound constructions.

pub mod canon;
pub mod constructions;
pub mod decomposition;
pub mod embedding;
pub mod error;
pub mod folio;
pub mod graph;
pub mod linkage;
pub mod minor;
pub mod pipeline;

pub use canon::{canonical_code, isomorphic, CanonicalCode};
pub use error::{Error, Result};
pub use graph::{AnnotatedGraph, Graph, RootedGraph, Separation};
