//! Sparsification of linear codes over finite Abelian product groups, with
//! the reductions that feed it: Boolean CSPs (symmetric, affine, and
//! almost-all predicates), Cayley graphs, hedge-graphs, and cardinality-based
//! splitting functions. Brute-force verification oracles are part of the
//! crate so every emitted sparsifier can be checked exactly at desk scale.

pub mod applications;
pub mod code;
pub mod csp;
pub mod error;
pub mod group;
pub mod lattice;
pub mod oracle;
pub mod spanning;
pub mod sparsify;

pub use code::{Codeword, GeneratingMatrix};
pub use error::{Error, Result};
pub use group::{GroupElement, GroupSpec};
pub use sparsify::{SparsifierResult, SparsifyConfig};
