//! Experiment runner for single-qudit data re-uploading models.
//!
//! A configuration file describes a task, a circuit family and a training
//! setup; [`runner::execute`] trains every (layer count, seed) pair and
//! writes CSV tables, JSON checkpoints and a manifest. Checkpoints can be
//! rendered as decision-region rasters or Fourier spectra.

pub mod checkpoint;
pub mod config;
pub mod error;
pub mod experiment;
pub mod render;
pub mod runner;

pub use error::{CliError, Result};
