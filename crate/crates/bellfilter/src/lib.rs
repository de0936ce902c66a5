//! File formats, reports and the `bellfilter` command line, built on
//! [`bellfilter_core`].

pub mod cli;
mod error;
pub mod formats;
pub mod report;

pub use error::{Error, Result};
