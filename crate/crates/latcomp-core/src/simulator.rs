//! Replays schedules on an occupancy grid.
//!
//! Every step is checked against the group-move rule before it is applied:
//! each mobile atom must land in bounds on a site that is vacant or is
//! itself being vacated by another mobile atom. This module does not reuse
//! any planner code, so a planner bug shows up here as an [`InvalidStep`].

use alloc::vec::Vec;

use crate::lattice::{Axis, OccupancyGrid};
use crate::planner::{CompactionStep, MobileRun, Schedule};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidStep {
    #[error("direction must be +1 or -1, got {0}")]
    BadDirection(i8),
    #[error("run {run} is empty")]
    EmptyRun { run: usize },
    #[error("run {run} leaves the lattice")]
    RunOutOfBounds { run: usize },
    #[error("run {run} starts or ends on a vacant site")]
    VacantEndpoint { run: usize },
    #[error("runs {first} and {second} overlap")]
    Overlap { first: usize, second: usize },
    #[error("run {run} would move an atom off the lattice")]
    DestinationOutOfBounds { run: usize },
    #[error("run {run} pushes into a stationary atom")]
    Blocked { run: usize },
    #[error("step claims {claimed} mobile atoms, runs hold {found}")]
    CountMismatch { claimed: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {index}: {reason}")]
pub struct StepError {
    pub index: usize,
    pub reason: InvalidStep,
}

/// What one executed step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub axis: Axis,
    pub direction: i8,
    pub mobile: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionReport {
    pub final_grid: OccupancyGrid,
    pub shift_cost: usize,
    pub flip_cost: usize,
    pub trace: Vec<StepRecord>,
}

/// Heating accumulated over a schedule and the steps after which the
/// lattice should be recooled.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatingBudget {
    pub total: f64,
    pub recool_after: Vec<usize>,
}

/// Returns the grid after `step`.
pub fn apply_step(grid: &OccupancyGrid, step: &CompactionStep) -> Result<OccupancyGrid, InvalidStep> {
    let mut next = grid.clone();
    apply_in_place(&mut next, step)?;
    Ok(next)
}

/// Checks and applies `step`; `grid` is untouched when the step is invalid.
/// Returns the number of atoms moved.
pub fn apply_in_place(grid: &mut OccupancyGrid, step: &CompactionStep) -> Result<usize, InvalidStep> {
    if step.direction != 1 && step.direction != -1 {
        return Err(InvalidStep::BadDirection(step.direction));
    }
    let axis = step.axis;
    let a = axis.index();
    let n = grid.extent(axis);
    let stride = grid.stride(axis);

    // (line id, first, last, original run index), first/last along the axis.
    let mut spans = Vec::with_capacity(step.runs.len());
    for (i, run) in step.runs.iter().enumerate() {
        if run.len == 0 {
            return Err(InvalidStep::EmptyRun { run: i });
        }
        let mut base = run.start;
        base[a] = 0;
        if !grid.contains(base) || run.start[a] + run.len > n {
            return Err(InvalidStep::RunOutOfBounds { run: i });
        }
        let first = run.start[a];
        let last = first + run.len - 1;
        let line = grid.index(base);
        let occ = grid.occupancy();
        if !occ[line + first * stride] || !occ[line + last * stride] {
            return Err(InvalidStep::VacantEndpoint { run: i });
        }
        spans.push((line, first, last, i));
    }
    spans.sort_unstable();
    for w in spans.windows(2) {
        if w[0].0 == w[1].0 && w[1].1 <= w[0].2 {
            return Err(InvalidStep::Overlap {
                first: w[0].3,
                second: w[1].3,
            });
        }
    }

    // The only atom of a run whose destination lies outside it is the
    // leading one; that destination must be vacant or the trailing site of
    // a neighbouring run moving the same way.
    let occ = grid.occupancy();
    for (k, &(line, first, last, i)) in spans.iter().enumerate() {
        let target = if step.direction > 0 {
            if last + 1 >= n {
                return Err(InvalidStep::DestinationOutOfBounds { run: i });
            }
            last + 1
        } else {
            if first == 0 {
                return Err(InvalidStep::DestinationOutOfBounds { run: i });
            }
            first - 1
        };
        if occ[line + target * stride] {
            let neighbour = if step.direction > 0 {
                spans.get(k + 1)
            } else {
                k.checked_sub(1).map(|j| &spans[j])
            };
            let moving = neighbour.is_some_and(|&(l, f, t, _)| l == line && (f..=t).contains(&target));
            if !moving {
                return Err(InvalidStep::Blocked { run: i });
            }
        }
    }

    let found: usize = spans
        .iter()
        .map(|&(line, first, last, _)| (first..=last).filter(|&p| occ[line + p * stride]).count())
        .sum();
    if found != step.atoms {
        return Err(InvalidStep::CountMismatch {
            claimed: step.atoms,
            found,
        });
    }

    // Runs are applied leading one first so a run never lands on atoms
    // that have not moved yet.
    let occ = grid.occupancy_mut();
    let order: Vec<_> = if step.direction > 0 {
        spans.iter().rev().collect()
    } else {
        spans.iter().collect()
    };
    for &(line, first, last, _) in order {
        if stride == 1 {
            let (s, e) = (line + first, line + last + 1);
            if step.direction > 0 {
                occ.copy_within(s..e, s + 1);
                occ[s] = false;
            } else {
                occ.copy_within(s..e, s - 1);
                occ[e - 1] = false;
            }
        } else if step.direction > 0 {
            for p in (first..=last).rev() {
                occ[line + (p + 1) * stride] = occ[line + p * stride];
            }
            occ[line + first * stride] = false;
        } else {
            for p in first..=last {
                occ[line + (p - 1) * stride] = occ[line + p * stride];
            }
            occ[line + last * stride] = false;
        }
    }
    Ok(found)
}

/// Applies `schedule` to a copy of `grid`, stopping at the first invalid step.
pub fn execute(grid: &OccupancyGrid, schedule: &Schedule) -> Result<ExecutionReport, StepError> {
    let mut work = grid.clone();
    let mut trace = Vec::with_capacity(schedule.shift_cost());
    let mut flip_cost = 0;
    for (index, step) in schedule.steps().iter().enumerate() {
        let moved = apply_in_place(&mut work, step).map_err(|reason| StepError { index, reason })?;
        flip_cost += 2 * moved;
        trace.push(StepRecord {
            axis: step.axis,
            direction: step.direction,
            mobile: moved,
        });
    }
    Ok(ExecutionReport {
        final_grid: work,
        shift_cost: trace.len(),
        flip_cost,
        trace,
    })
}

/// Fraction of the lattice depth after which recooling is scheduled when
/// no explicit threshold is configured.
pub const DEFAULT_RECOOL_FRACTION: f64 = 0.1;

/// Total heating `shift_cost * per_shift_energy`. When the energy
/// accumulated since the last recool exceeds `recool_threshold`, a marker
/// is placed after that step and the accumulator restarts.
pub fn heating_budget(report: &ExecutionReport, per_shift_energy: f64, recool_threshold: Option<f64>) -> HeatingBudget {
    debug_assert!(per_shift_energy >= 0.0);
    let mut recool_after = Vec::new();
    if let Some(limit) = recool_threshold {
        let mut acc = 0.0;
        for step in 0..report.shift_cost {
            acc += per_shift_energy;
            if acc > limit {
                recool_after.push(step);
                acc = 0.0;
            }
        }
    }
    HeatingBudget {
        total: report.shift_cost as f64 * per_shift_energy,
        recool_after,
    }
}

/// Single-run step moving the given stretch; convenient for hand-built schedules.
pub fn single_run_step(axis: Axis, direction: i8, run: MobileRun, atoms: usize) -> CompactionStep {
    CompactionStep {
        axis,
        direction,
        runs: alloc::vec![run],
        atoms,
    }
}
