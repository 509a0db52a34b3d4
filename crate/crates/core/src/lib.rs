//! Certificate-producing construction of 2-colorings with a free vertex
//! for 4-regular 4-uniform hypergraphs.
//!
//! The library is organized around a constructive solver for a structural
//! property of NAE-3-SAT: every connected non-trivial instance with fewer
//! clauses than variables and maximum degree 3 is nae-satisfiable with a
//! variable left free. On top of that sit the hypergraph-level
//! procedures: a search-based 2-coloring finder, a routine producing two
//! free vertices for sparse 3-uniform hypergraphs, and the full
//! free-vertex construction for 4-regular 4-uniform hypergraphs.
//! Brute-force oracles in [`oracle`] independently verify every output.

pub mod colorer;
pub mod convert;
pub mod error;
pub mod gen;
pub mod hypergraph;
pub mod io;
pub mod nae;
pub mod oracle;
pub mod solver;
mod union_find;

pub use error::{GenError, ModelError, OracleError};
pub use hypergraph::{Color, ColoringCertificate, Hypergraph, PartialColoring};
pub use nae::{Clause, Literal, NaeCertificate, NaeInstance, PartialAssignment};
