pub mod classify;
pub mod cli;
pub mod entropy;
pub mod laurent;
pub mod lattice;
pub mod shiftspace;
