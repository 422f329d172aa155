//! File formats and command line for the temporal deontic STIT checker.

pub mod cli;
pub mod io;
