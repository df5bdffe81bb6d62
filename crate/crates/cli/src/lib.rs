//! Command-line pipeline around `camid-core`: image decoding, manifest
//! and feature-cache files, model persistence, and the four subcommands
//! (`extract`, `train`, `predict`, `eval`).

pub mod cache;
pub mod cli;
pub mod commands;
pub mod error;
pub mod imageio;
pub mod manifest;
pub mod model;
pub mod report;

pub use error::{CliError, ExitCode};
