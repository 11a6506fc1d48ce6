//! Simulation and theory for the preferential attachment random graph
//! process on a fixed vertex set.

pub mod graph;
pub mod montecarlo;
pub mod oracle;
pub mod processes;
pub mod stats;
pub mod theory;
