//! File formats, configuration and the command implementations behind the
//! `trienhance` binary.

pub mod commands;
pub mod config;
pub mod csv_io;
pub mod model_io;
pub mod report;
