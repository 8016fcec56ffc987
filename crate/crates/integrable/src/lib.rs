//! Numerical toolkit for exactly solvable stochastic models.
//!
//! The crate builds R-matrices, quantum-group representations, exclusion
//! process generators, stochastic vertex weights and matrix product states,
//! and checks every algebraic identity they are supposed to satisfy against
//! brute-force linear algebra.
//!
//! Conventions shared by all modules:
//!
//! * Operators act on `(C^d1) ⊗ ... ⊗ (C^dn)` with the basis ordered
//!   lexicographically, site 1 slowest.
//! * Generators have rows summing to zero and stochastic matrices have rows
//!   summing to one; `G[c, c']` is the rate of the move `c -> c'`.
//! * For two-state sites, index 0 is an empty site and index 1 an occupied one.

// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops mirror the matrix formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod exec;
pub mod models;
pub mod mpa;
pub mod oscillator;
pub mod qnum;
pub mod sixvertex;
pub mod tensor;
pub mod uqsl2;
pub mod ybe;

pub use error::{Error, Result};
pub use exec::Exec;
pub use num_complex::Complex64 as C64;
pub use tensor::{Operator, ProbVector};
