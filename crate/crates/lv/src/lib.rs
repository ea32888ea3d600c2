//! Filesystem side of the layered HMM tagger: corpus and model file formats,
//! CSV reports, run configuration and the `lv` command line.

pub mod cli;
pub mod config;
pub mod csv_out;
pub mod error;
pub mod model_file;
pub mod tsv;

pub use error::{LvError, Result};
