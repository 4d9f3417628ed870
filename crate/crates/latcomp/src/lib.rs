//! File formats, configuration, worker pools and the `latcomp` command line
//! around [`latcomp_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod flipjob;
pub mod formats;
pub mod header;
pub mod montecarlo;
pub mod physics;

pub use error::{CliError, Result};

/// Modeled duration of one planner step (two rotations and the flips), s.
pub const DEFAULT_STEP_SECONDS: f64 = 6e-3;
