//! Exact additive combinatorics over prime fields.
//!
//! The crate computes representation functions, additive energies, collinear
//! triple and quadruple counts and their fiberwise `t`/`q` functions for
//! subsets of `F_p`, evaluates both sides of the known bounds for these
//! quantities on concrete instances, and runs complete searches for sumset and
//! ratio-set decompositions of multiplicative subgroups.

pub mod bounds;
pub mod decompose;
pub mod error;
pub mod field;
pub mod fpset;
pub mod incidence;
pub mod setops;
pub mod survey;

pub use error::{Error, Result};
pub use field::{PrimeField, Subgroup};
pub use fpset::{CountTable, FpSet};
