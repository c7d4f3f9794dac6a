//! Weighted Model Integration (WMI) over SMT(LRA) formulas.
//!
//! The crate provides:
//! - an exact-rational data model for WMI problems (formulas, piecewise
//!   weight functions, partial assignments) and a text problem format,
//! - an SMT(LRA + EUF) satisfiability checker and AllSMT enumerator with
//!   predicate abstraction and blocking clauses,
//! - a conditional-skeleton encoder that labels the if-then-else structure
//!   of a weight function with fresh variables and EUF symbols,
//! - an exact polynomial-over-polytope integration backend,
//! - three end-to-end WMI algorithms (brute force, predicate abstraction,
//!   and the structure-aware variant) plus a benchmark/query front end.

pub mod bench;
pub mod engine;
pub mod error;
pub mod integrate;
pub mod model;
pub mod skeleton;
pub mod smt;

pub use error::WmiError;
pub use model::problem::Problem;

/// Exact rational scalar used everywhere in the core. No floating point.
pub type Rat = num::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

/// Convenience constructor for integers.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(n.into())
}
