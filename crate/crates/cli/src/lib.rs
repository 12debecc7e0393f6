//! Library surface of the `nilspec` command line tool. The binary is a thin
//! clap wrapper; everything it does lives here so the integration tests can
//! drive commands directly and byte-compare the files they write.

pub mod checks;
pub mod commands;
pub mod config;
pub mod report;
