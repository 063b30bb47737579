//! Experiment plumbing behind the `hbn` binary: file formats, experiment
//! configuration, the batch runner and the desk-scale table and curve
//! reproductions.

pub mod blacklist;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod reproduce;
pub mod strategy;

pub use error::{CliError, Result};
