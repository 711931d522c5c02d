//! Lie-algebraic analysis of bipartite quantum control systems.
//!
//! Given the control Hamiltonians of a system S coupled to a fully
//! controlled auxiliary A, this crate computes the dynamical Lie algebra,
//! decides whether S is indirectly controllable for a given initial
//! ancilla state, and, when it is, synthesizes and verifies the steering
//! unitary realizing a target conjugation on S.

pub mod closure;
pub mod models;
pub mod error;
pub mod linalg;
pub mod op;
pub mod span;
pub mod structure;
pub mod symmetric;
pub mod tol;
pub mod verdict;

pub use error::{Error, Result};
pub use op::{BipartiteSplit, OpMat};
pub use tol::Tolerance;
