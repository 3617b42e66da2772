//! Subcommands of the `qpoker` experiment harness.
//!
//! Every command is deterministic under its seed. CSV outputs start with `#` comment lines,
//! one of which is `config_hash`, the SHA-256 of the effective configuration.

pub mod commands;
pub mod error;
pub mod inputs;
pub mod output;

pub use error::{CliError, CliResult};
