//! Command-line front end for the pagiant simulation lab.

pub mod simulate;
pub mod spec;
pub mod sweep;
pub mod theory_cmd;
pub mod verify;
