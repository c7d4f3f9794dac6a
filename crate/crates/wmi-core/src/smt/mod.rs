//! Satisfiability and assignment enumeration for the mixed
//! Boolean/arithmetic/uninterpreted-function fragment used by the engine.

pub mod delta;
pub mod enumerate;
pub mod euf;
pub mod fourier_motzkin;
pub mod simplex;
pub mod theory;
