//! Experiment harness for `fluxknot-core`: configuration files, CSV output,
//! parallel Monte Carlo, the command-line front end and the acceptance suite.

pub mod assembly_io;
pub mod commands;
pub mod config;
pub mod output;
pub mod parallel;
pub mod spec;
pub mod verify;
