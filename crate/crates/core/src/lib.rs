//! Exact arithmetic in a concrete nonstandard model of arithmetic (the
//! nonnegative integer part of finite generalized power series), decision
//! procedures for the equivalence levels E0..E4 with checkable witnesses,
//! constructive order-automorphisms, and class-structure computations.

pub mod analysis;
pub mod automorph;
pub mod cli;
pub mod equiv;
pub mod oracle;
pub mod series;
