//! Compaction of neutral-atom optical lattices.
//!
//! Two halves live in this crate:
//!
//! * the occupancy side: [`lattice`] grids, the [`planner`] that turns a
//!   sparse lattice into a unit-filled block through parallel shift steps,
//!   and the [`simulator`] that replays and validates those steps;
//! * the physics side: the state-dependent lattice [`potential`], a
//!   Fourier-grid / Chebyshev [`spectral`] propagator, the heating and
//!   fidelity study of a single [`shift`], and the site-selective [`flip`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and the worker pools live in the `latcomp` crate.
#![no_std]

extern crate alloc;

pub mod flip;
pub mod lattice;
pub mod planner;
pub mod potential;
pub mod shift;
pub mod simulator;
pub mod spectral;
pub mod units;

/// Version of this crate, recorded in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use lattice::{Axis, OccupancyGrid, SublatticeView};
pub use planner::{plan, worst_case_bound, CompactionStep, Schedule};
pub use simulator::{execute, ExecutionReport};
