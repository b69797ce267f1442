//! File formats, run configuration and the commands behind the `czp` binary.

pub mod commands;
pub mod config;
pub mod export;
pub mod field_file;
pub mod selftest;

pub use commands::*;
pub use config::{RunConfig, CONFIG_ENV};
pub use field_file::FieldFile;
pub use selftest::{cmd_selftest, Check, SelftestReport};
