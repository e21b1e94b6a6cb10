//! Computation with finite Boolean algebras and their subalgebras.
//!
//! Every finite Boolean algebra handled here is a subalgebra of an ambient
//! powerset `P(m)`, stored as the partition of `{0, .., m-1}` into its atoms.
//! On top of that representation the crate decides commutativity and weak
//! commutativity of tuples of subalgebras ([`commute`]), builds n-ary pushouts
//! of overlapping algebras and decides amalgamation ([`amalgam`]), applies the
//! hyperspace and symmetric-power functors to finite cubes ([`functors`]) and
//! computes n-ary propositional interpolants ([`logic`]).

pub mod algebra;
pub mod amalgam;
pub mod commute;
mod error;
pub mod fixtures;
pub mod functors;
pub mod logic;

pub use algebra::{Element, ElementFamily, Subalgebra};
pub use error::{Error, Result};
