//! Nondeterministic program schemes over finite structures.

pub mod engine;
pub mod fuzz;
pub mod lang;
pub mod model;
pub mod petri;
pub mod problems;
pub mod translate;
