//! Command-line front end: argument parsing, dispatch and report rendering.

pub mod commands;
pub mod report;

pub use commands::{run, Cli};
pub use report::{Format, Report};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const VERIFICATION_FAILED: i32 = 3;
}
