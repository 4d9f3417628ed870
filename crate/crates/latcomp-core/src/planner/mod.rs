//! Shift schedules that compact a lattice.
//!
//! A lattice is compacted in two parts: the rows are first *balanced* so
//! that their atom counts differ by at most one, then every row is
//! compacted toward `x = 0` in parallel. One-dimensional lattices skip the
//! first part.
//!
//! A [`CompactionStep`] is one polarization cycle: every mobile atom moves
//! one site along a single axis. Mobile atoms are described by
//! [`MobileRun`]s, contiguous stretches of a lattice line whose occupied
//! sites are all mobile. This keeps a step over a long row O(1) in size;
//! [`CompactionStep::mobile_sites`] expands it when explicit coordinates are
//! wanted.

mod balance;
mod compact;

use alloc::vec::Vec;

use crate::lattice::{Axis, Coord, OccupancyGrid};

pub use balance::{balance_2d, balance_3d, BalanceSummary, BalanceTreeNode};
pub use compact::{compact_1d, row_compact};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("{op} expects a {expected}-D lattice, got {got}-D")]
    WrongDims {
        op: &'static str,
        expected: usize,
        got: usize,
    },
}

/// A stretch of `len` sites starting at `start` and running in the positive
/// direction of the step axis. Both end sites hold atoms; every atom in
/// between is mobile too.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MobileRun {
    pub start: Coord,
    pub len: usize,
}

/// One shift cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactionStep {
    pub axis: Axis,
    /// +1 or -1 along `axis`.
    pub direction: i8,
    pub runs: Vec<MobileRun>,
    /// Number of mobile atoms the planner expects the runs to contain.
    pub atoms: usize,
}

impl CompactionStep {
    /// Sites of every atom that moves in this step, read against `grid`
    /// as it is before the step.
    pub fn mobile_sites(&self, grid: &OccupancyGrid) -> Vec<Coord> {
        let a = self.axis.index();
        let mut out = Vec::with_capacity(self.atoms);
        for run in &self.runs {
            let mut c = run.start;
            for t in 0..run.len {
                c[a] = run.start[a] + t;
                if grid.is_occupied(c) {
                    out.push(c);
                }
            }
        }
        out
    }
}

/// An ordered list of steps with its cost.
///
/// `shift_cost` counts steps (one unit of time each); `flip_cost` counts two
/// state flips per mobile atom per step.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    steps: Vec<CompactionStep>,
    flip_cost: usize,
    balance: Option<BalanceSummary>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: CompactionStep) {
        self.flip_cost += 2 * step.atoms;
        self.steps.push(step);
    }

    /// Appends the steps of `other`; balance metadata of `self` is kept
    /// unless it has none.
    pub fn extend(&mut self, other: Schedule) {
        for step in other.steps {
            self.push(step);
        }
        if self.balance.is_none() {
            self.balance = other.balance;
        }
    }

    pub fn steps(&self) -> &[CompactionStep] {
        &self.steps
    }

    pub fn shift_cost(&self) -> usize {
        self.steps.len()
    }

    pub fn flip_cost(&self) -> usize {
        self.flip_cost
    }

    /// Balancing record for 2-D and 3-D schedules.
    pub fn balance(&self) -> Option<&BalanceSummary> {
        self.balance.as_ref()
    }

    pub(crate) fn set_balance(&mut self, summary: BalanceSummary) {
        self.balance = Some(summary);
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Full compaction plan: balance (2-D / 3-D) then row compaction.
pub fn plan(grid: &OccupancyGrid) -> Schedule {
    match grid.dims() {
        1 => compact::compact_rows(grid),
        dims => {
            let mut work = grid.clone();
            let mut schedule = balance::balance_in_place(&mut work, dims);
            schedule.extend(compact::compact_rows(&work));
            schedule
        }
    }
}

/// Worst-case step count: n, ceil(5n/2), ceil(9n/2) for 1, 2, 3 dimensions.
pub fn worst_case_bound(dims: usize, n: usize) -> usize {
    match dims {
        1 => n,
        2 => (5 * n).div_ceil(2),
        _ => (9 * n).div_ceil(2),
    }
}

/// Ceil of log2 n, 0 for n <= 1.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
