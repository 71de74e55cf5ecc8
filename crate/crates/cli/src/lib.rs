//! Command-line front end: configuration layering, subcommands and rendering.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
