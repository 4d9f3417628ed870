//! Left-justification of rows along x.
//!
//! Each step moves every atom to the right of a row's leftmost vacancy one
//! site left. A row is tracked as its solid head plus a queue of
//! `(gap, cluster)` pairs, so each step is O(1) per row: the first gap
//! shrinks by one and merges into the head when it closes.

use alloc::vec::Vec;

use super::{CompactionStep, MobileRun, PlanError, Schedule};
use crate::lattice::{Axis, OccupancyGrid};

/// COMPACT on a 1-D lattice.
pub fn compact_1d(grid: &OccupancyGrid) -> Result<Schedule, PlanError> {
    if grid.dims() != 1 {
        return Err(PlanError::WrongDims {
            op: "compact_1d",
            expected: 1,
            got: grid.dims(),
        });
    }
    Ok(compact_rows(grid))
}

/// Compacts every row in parallel; steps are shared between rows, so the
/// cost is that of the slowest row.
pub fn row_compact(grid: &OccupancyGrid) -> Schedule {
    compact_rows(grid)
}

struct RowState {
    y: usize,
    z: usize,
    /// Position of the leftmost vacancy, equal to the length of the solid head.
    head: usize,
    last_atom: usize,
    atoms: usize,
    gaps: Vec<(usize, usize)>,
    next: usize,
}

impl RowState {
    fn parse(row: &[bool], y: usize, z: usize) -> Self {
        let head = row.iter().take_while(|&&o| o).count();
        let mut gaps = Vec::new();
        let mut x = head;
        let mut last_atom = head.saturating_sub(1);
        while x < row.len() {
            let gap = row[x..].iter().take_while(|&&o| !o).count();
            x += gap;
            if x == row.len() {
                break;
            }
            let cluster = row[x..].iter().take_while(|&&o| o).count();
            gaps.push((gap, cluster));
            x += cluster;
            last_atom = x - 1;
        }
        Self {
            y,
            z,
            head,
            last_atom,
            atoms: row.iter().filter(|&&o| o).count(),
            gaps,
            next: 0,
        }
    }

    /// Mobile stretch for the next step, then advances the row.
    fn step(&mut self) -> Option<(MobileRun, usize)> {
        let (gap, cluster) = self.gaps.get_mut(self.next)?;
        let first = self.head + *gap;
        let run = MobileRun {
            start: [first, self.y, self.z],
            len: self.last_atom - first + 1,
        };
        let moving = self.atoms - self.head;
        *gap -= 1;
        self.last_atom -= 1;
        if *gap == 0 {
            self.head += *cluster;
            self.next += 1;
        }
        Some((run, moving))
    }
}

pub(crate) fn compact_rows(grid: &OccupancyGrid) -> Schedule {
    let mut rows = Vec::new();
    for z in 0..grid.extent(Axis::Z) {
        for y in 0..grid.extent(Axis::Y) {
            let state = RowState::parse(grid.row(y, z), y, z);
            if !state.gaps.is_empty() {
                rows.push(state);
            }
        }
    }
    let mut schedule = Schedule::new();
    loop {
        let mut runs = Vec::new();
        let mut atoms = 0;
        for row in rows.iter_mut() {
            if let Some((run, moving)) = row.step() {
                runs.push(run);
                atoms += moving;
            }
        }
        if runs.is_empty() {
            break;
        }
        schedule.push(CompactionStep {
            axis: Axis::X,
            direction: -1,
            runs,
            atoms,
        });
    }
    schedule
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vacancies_before_last_atom(bits: &[u8]) -> usize {
        match bits.iter().rposition(|&b| b != 0) {
            Some(last) => bits[..last].iter().filter(|&&b| b == 0).count(),
            None => 0,
        }
    }

    #[test]
    fn compact_already_full_row() {
        let s = compact_1d(&OccupancyGrid::line(&[1, 1, 1, 1])).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn compact_alternating_row() {
        let g = OccupancyGrid::line(&[1, 0, 1, 0, 1]);
        let s = compact_1d(&g).unwrap();
        assert_eq!(s.shift_cost(), 2);
        assert_eq!(s.flip_cost(), 6);
        assert_eq!(s.steps()[0].mobile_sites(&g), [[2, 0, 0], [4, 0, 0]]);
    }

    #[test]
    fn compact_single_trailing_atom() {
        let s = compact_1d(&OccupancyGrid::line(&[0, 0, 0, 1])).unwrap();
        assert_eq!(s.shift_cost(), 3);
        assert!(s.steps().iter().all(|st| st.atoms == 1));
    }

    #[test]
    fn compact_cost_matches_vacancy_count() {
        let cases: [&[u8]; 6] = [
            &[0],
            &[1, 0],
            &[0, 1, 1, 0, 0, 1],
            &[1, 1, 0, 0, 0, 1, 0, 1, 1],
            &[0, 0, 0, 0],
            &[0, 1, 0, 1, 0, 1, 0, 1],
        ];
        for bits in cases {
            let s = compact_1d(&OccupancyGrid::line(bits)).unwrap();
            assert_eq!(s.shift_cost(), vacancies_before_last_atom(bits), "{bits:?}");
        }
    }

    #[test]
    fn rows_share_steps() {
        // Both rows have a single vacancy left of an atom, so one shared step.
        let g = OccupancyGrid::plane(&[&[1, 0, 1], &[0, 1, 1]]).unwrap();
        let s = row_compact(&g);
        assert_eq!(s.shift_cost(), 1);
        assert_eq!(s.steps()[0].atoms, 3);

        let g = OccupancyGrid::plane(&[&[1, 0, 1], &[0, 0, 1]]).unwrap();
        let s = row_compact(&g);
        assert_eq!(s.shift_cost(), 2);
        assert_eq!(s.steps()[0].runs.len(), 2);
        assert_eq!(s.steps()[1].runs.len(), 1);
    }

    #[test]
    fn compact_1d_rejects_planes() {
        let g = OccupancyGrid::empty(&[2, 2]).unwrap();
        assert!(compact_1d(&g).is_err());
    }
}
