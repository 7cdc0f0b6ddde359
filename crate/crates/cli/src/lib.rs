//! File formats and report rendering for the `relred` binary.

pub mod formats;
pub mod report;

pub const TOOL_NAME: &str = "relred";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
