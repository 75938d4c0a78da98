//! Simulation and analysis toolkit for the periodically driven Kitaev
//! honeycomb model.

pub mod analysis;
pub mod cli;
pub mod circuits;
pub mod dense;
pub mod experiments;
pub mod gaussian;
pub mod lattice;
pub mod majorana;
pub mod stabilizer;
