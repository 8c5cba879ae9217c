//! File formats, exact oracles and subcommand implementations behind the
//! `treewave` binary.

pub mod cli;
pub mod edgelist;
pub mod eigio;
pub mod exact;
pub mod json;

pub use cli::Outcome;
