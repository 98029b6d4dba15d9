//! File formats, parallel drivers and the command-line tool built on
//! `labelwork-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod parallel;
pub mod report;

pub use error::{Error, Result};
pub use labelwork_core as core;
