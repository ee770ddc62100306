//! Configuration, CSV tables and SVG rendering.

pub mod config;
pub mod svg;
pub mod tables;

pub use config::{parse_config, RunConfig};
