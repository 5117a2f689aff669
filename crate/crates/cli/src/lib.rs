//! File formats and command implementations behind the `lawcat` binary.

pub mod commands;
pub mod format;
