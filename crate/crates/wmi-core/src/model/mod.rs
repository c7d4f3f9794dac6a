//! Problem data model: variables, linear terms, atoms, formulas, weight
//! terms, assignments and the text problem format.

pub mod assignment;
pub mod atom;
pub mod formula;
pub mod linear;
pub mod parser;
pub mod printer;
pub mod problem;
pub mod vars;
pub mod weight;

pub use assignment::Assignment;
pub use atom::{Atom, Literal, Relation};
pub use formula::Formula;
pub use linear::LinearTerm;
pub use problem::Problem;
pub use vars::{BoolVar, RealVar, YVar};
pub use weight::{BinOp, WeightTerm};
