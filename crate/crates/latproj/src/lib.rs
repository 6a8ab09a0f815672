//! Lattice projection toolkit.
//!
//! Builds projections of a full-rank lattice onto the orthogonal complement
//! of a primitive set of lattice vectors, and searches for primitive sets
//! whose projection approximates a prescribed lower-dimensional target
//! lattice arbitrarily well (up to similarity). Ships with exact
//! primitivity certificates, duality cross-checks, a small shortest-vector
//! enumerator for packing-density diagnostics, and a CLI.

pub mod approximation;
pub mod cli;
pub mod error;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod projection;
pub mod svp;

pub use error::{Error, Result};
pub use lattice::{Lattice, PrimitiveCertificate};
pub use matrix::{IntMatrix, RealMatrix};
