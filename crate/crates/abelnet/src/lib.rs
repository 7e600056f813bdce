//! Finite abelian networks: communicating automata with commutative local
//! rules. The crate builds the standard families (rotor, sandpile,
//! height-arrow, toppling, arithmetical, branching rotor, inverse), runs
//! their executions, and computes their exact algebraic invariants:
//! production matrix, total kernel, Perron classification, period and
//! exchange-rate vectors, torsion groups, recurrence tests, update-rule
//! dynamics, and determinantal enumeration identities. All decisions use
//! exact integer/rational arithmetic.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod core;
pub mod dynamics;
pub mod enumeration;
pub mod error;
pub mod mat;
pub mod netfile;
pub(crate) mod cache;
pub mod series;
pub mod recurrence;
pub mod zoo;

pub use crate::core::{Configuration, Digraph, Network, Processor};
pub use crate::error::NetError;
pub use crate::zoo::{build, validate_abelian, NetworkSpec};
