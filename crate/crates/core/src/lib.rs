//! Exact verification engine for the centrally extended algebra of
//! differential operators on the circle and its twisted bosonic realizations.
//!
//! - [`arith`]: rationals, cyclotomic fields, Bernoulli values, truncated series.
//! - [`diffop`]: the algebras `D^` and `D^+`, cocycle, generators, structure constants.
//! - [`fock`]: twisted Heisenberg Fock modules and the quadratic operators `L^(r)(n)`.
//! - [`fields`]: twisted vertex operators, iterates and identity checks.
//! - [`report`]: check records shared by all verification suites.

pub mod arith;
pub mod diffop;
pub mod error;
pub mod fields;
pub mod fock;
pub mod report;

pub use error::{Error, Result};
