//! Exact computations around Rogers–Ramanujan type partition identities:
//! cyclotomic arithmetic, twisted root lattices, truncated q-series,
//! partition sets, pattern-avoidance automata, q-difference equations and
//! Z-operators on principally graded Fock spaces.

pub mod automata;
pub mod cyclo;
pub mod fock;
pub mod lattice;
pub mod linalg;
pub mod partitions;
pub mod poly;
pub mod qdiff;
pub mod qseries;
