pub mod algebra;
pub mod classify;
pub mod fixtures;
pub mod gen;
pub mod grid;
pub mod identities;
pub mod sigcalc;
pub mod solvers;
