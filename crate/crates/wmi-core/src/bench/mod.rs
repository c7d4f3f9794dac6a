//! Benchmark front end: a seeded random problem generator, density
//! estimation tree models with oblique-constraint queries, and a runner
//! that emits one CSV row per (problem, algorithm) pair.

pub mod det;
pub mod gen;
pub mod runner;
