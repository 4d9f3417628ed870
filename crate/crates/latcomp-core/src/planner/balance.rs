//! Recursive halving that equalizes row atom counts.
//!
//! A sublattice of rows is split at `m = (i + j) / 2` into a lower half A
//! and an upper half B. Atoms cross the boundary until N(A) lies in the
//! window that lets both halves hold between `n_min` and `n_min + 1` atoms
//! per row, where `n_min = N / rows`; then both halves recurse. In 3-D the
//! split axis alternates between y (even depths) and z (odd depths).
//!
//! Splits of one depth are processed together: all transfers toward lower
//! indices share steps, then all transfers toward higher indices.
//!
//! Atoms cross along *columns*, the lines parallel to the split axis. In
//! each column the carriers are the atoms nearest the boundary, so s steps
//! deliver every carrier within distance s. A carrier blocked by another
//! atom pushes it, and the whole occupied stretch moves to the first
//! vacancy; that vacancy always lies inside the sublattice because the
//! column is given no more carriers than it has vacancies on the far side.

use alloc::vec;
use alloc::vec::Vec;

use super::{ceil_log2, CompactionStep, MobileRun, PlanError, Schedule};
use crate::lattice::{Axis, Coord, OccupancyGrid};

/// One split of the balancing recursion. Ranges are 1-based and inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceTreeNode {
    pub rows: (usize, usize),
    /// z-planes of the sublattice, 3-D only.
    pub planes: Option<(usize, usize)>,
    pub depth: usize,
    /// Axis the sublattice is split along.
    pub axis: Axis,
    /// Last index of the lower half along `axis`, 1-based.
    pub mid: usize,
    /// Atoms moved from the lower half into the upper half; negative when
    /// they moved the other way.
    pub transfer: i64,
    /// Number of transfer passes; more than one means the fallback ran.
    pub passes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BalanceSummary {
    pub tree: Vec<BalanceTreeNode>,
    /// Number of recursion levels that split at least one sublattice.
    pub depth: usize,
    /// Steps spent balancing.
    pub shift_cost: usize,
    /// Set when a transfer could not be routed in one pass, or a depth
    /// needed more steps than half its widest sublattice.
    pub fallback: bool,
}

/// Balances the y-rows of a 2-D lattice.
pub fn balance_2d(grid: &OccupancyGrid) -> Result<Schedule, PlanError> {
    check_dims(grid, 2, "balance_2d")?;
    Ok(balance_in_place(&mut grid.clone(), 2))
}

/// Balances the (y, z) rows of a 3-D lattice.
pub fn balance_3d(grid: &OccupancyGrid) -> Result<Schedule, PlanError> {
    check_dims(grid, 3, "balance_3d")?;
    Ok(balance_in_place(&mut grid.clone(), 3))
}

fn check_dims(grid: &OccupancyGrid, dims: usize, op: &'static str) -> Result<(), PlanError> {
    if grid.dims() == dims {
        Ok(())
    } else {
        Err(PlanError::WrongDims {
            op,
            expected: dims,
            got: grid.dims(),
        })
    }
}

/// 0-based inclusive row block.
#[derive(Debug, Clone, Copy)]
struct Block {
    y: (usize, usize),
    z: (usize, usize),
}

impl Block {
    fn range(&self, axis: Axis) -> (usize, usize) {
        match axis {
            Axis::Z => self.z,
            _ => self.y,
        }
    }

    fn len(&self, axis: Axis) -> usize {
        let (lo, hi) = self.range(axis);
        hi - lo + 1
    }

    fn with_range(mut self, axis: Axis, r: (usize, usize)) -> Block {
        match axis {
            Axis::Z => self.z = r,
            _ => self.y = r,
        }
        self
    }

    fn atoms(&self, grid: &OccupancyGrid) -> usize {
        let mut n = 0;
        for z in self.z.0..=self.z.1 {
            for y in self.y.0..=self.y.1 {
                n += grid.row_count(y, z);
            }
        }
        n
    }

    fn rows(&self) -> usize {
        self.len(Axis::Y) * self.len(Axis::Z)
    }
}

struct Split {
    block: Block,
    axis: Axis,
    /// Last 0-based index of the lower half along `axis`.
    mid: usize,
}

impl Split {
    fn lower(&self) -> Block {
        let (lo, _) = self.block.range(self.axis);
        self.block.with_range(self.axis, (lo, self.mid))
    }

    fn upper(&self) -> Block {
        let (_, hi) = self.block.range(self.axis);
        self.block.with_range(self.axis, (self.mid + 1, hi))
    }

    /// Atoms that still have to cross: direction +1 moves them from the
    /// lower half to the upper one.
    fn need(&self, grid: &OccupancyGrid) -> (i8, usize) {
        let (a, b) = (self.lower(), self.upper());
        let na = a.atoms(grid) as i64;
        let n = na + b.atoms(grid) as i64;
        let (ra, rb) = (a.rows() as i64, b.rows() as i64);
        let n_min = n / (ra + rb);
        let lo = (ra * n_min).max(n - rb * (n_min + 1));
        let hi = (ra * (n_min + 1)).min(n - rb * n_min);
        if na < lo {
            (-1, (lo - na) as usize)
        } else if na > hi {
            (1, (na - hi) as usize)
        } else {
            (0, 0)
        }
    }

    /// Axis range the carriers leave when moving in `dir`.
    fn source(&self, dir: i8) -> (usize, usize) {
        let half = if dir > 0 { self.lower() } else { self.upper() };
        half.range(self.axis)
    }

    fn destination(&self, dir: i8) -> (usize, usize) {
        let half = if dir > 0 { self.upper() } else { self.lower() };
        half.range(self.axis)
    }

    fn node(&self, depth: usize, dims: usize) -> BalanceTreeNode {
        BalanceTreeNode {
            rows: (self.block.y.0 + 1, self.block.y.1 + 1),
            planes: (dims == 3).then_some((self.block.z.0 + 1, self.block.z.1 + 1)),
            depth,
            axis: self.axis,
            mid: self.mid + 1,
            transfer: 0,
            passes: 0,
        }
    }
}

pub(crate) fn balance_in_place(grid: &mut OccupancyGrid, dims: usize) -> Schedule {
    let axes: &[Axis] = if dims == 3 { &[Axis::Y, Axis::Z] } else { &[Axis::Y] };
    let mut level = vec![Block {
        y: (0, grid.extent(Axis::Y) - 1),
        z: (0, grid.extent(Axis::Z) - 1),
    }];
    let mut schedule = Schedule::new();
    let mut summary = BalanceSummary::default();
    let mut depth = 0;
    let mut scratch = Scratch::new(grid.total_sites());
    while level.iter().any(|b| b.rows() > 1) {
        let axis = axes[depth % axes.len()];
        let mut splits = Vec::new();
        let mut next = Vec::with_capacity(2 * level.len());
        for block in level {
            if block.len(axis) > 1 {
                let (lo, hi) = block.range(axis);
                let split = Split {
                    block,
                    axis,
                    mid: (lo + hi) / 2,
                };
                next.push(split.lower());
                next.push(split.upper());
                splits.push(split);
            } else {
                next.push(block);
            }
        }
        if !splits.is_empty() {
            let before = schedule.shift_cost();
            let nodes = balance_level(grid, &splits, depth, dims, &mut schedule, &mut scratch);
            let widest = splits.iter().map(|s| s.block.len(s.axis)).max().unwrap_or(0);
            let spent = schedule.shift_cost() - before;
            if nodes.iter().any(|n| n.passes > 1) || spent > widest.div_ceil(2) + widest / 2 {
                summary.fallback = true;
            }
            summary.tree.extend(nodes);
            summary.depth = depth + 1;
        }
        level = next;
        depth += 1;
    }
    summary.shift_cost = schedule.shift_cost();
    debug_assert!(summary.depth <= axes.len() * ceil_log2(grid.extent(Axis::Y).max(grid.extent(Axis::Z))));
    schedule.set_balance(summary);
    schedule
}

/// Per-step mark buffer: a site is marked when its stamp equals the
/// current step number, so nothing has to be cleared between steps.
struct Scratch {
    stamp: Vec<u32>,
    now: u32,
}

impl Scratch {
    fn new(sites: usize) -> Self {
        Self {
            stamp: vec![0; sites],
            now: 0,
        }
    }

    fn next_step(&mut self) {
        self.now += 1;
    }

    fn mark(&mut self, i: usize) {
        self.stamp[i] = self.now;
    }

    fn marked(&self, i: usize) -> bool {
        self.stamp[i] == self.now
    }
}

// The transfer is always routable in one pass (a column with no capacity
// has an empty source or a full destination, and if every column is like
// that the halves already satisfy the window), so this only guards
// against a logic error.
const MAX_PASSES: usize = 8;

fn balance_level(
    grid: &mut OccupancyGrid,
    splits: &[Split],
    depth: usize,
    dims: usize,
    schedule: &mut Schedule,
    scratch: &mut Scratch,
) -> Vec<BalanceTreeNode> {
    let mut nodes: Vec<BalanceTreeNode> = splits.iter().map(|s| s.node(depth, dims)).collect();
    for _ in 0..MAX_PASSES {
        let needs: Vec<(i8, usize)> = splits.iter().map(|s| s.need(grid)).collect();
        if needs.iter().all(|&(_, t)| t == 0) {
            break;
        }
        for dir in [-1i8, 1] {
            let mut carriers = Vec::new();
            for (k, split) in splits.iter().enumerate() {
                let (d, t) = needs[k];
                if d != dir || t == 0 {
                    continue;
                }
                let chosen = select_carriers(grid, split, dir, t);
                nodes[k].transfer += dir as i64 * chosen.len() as i64;
                nodes[k].passes += 1;
                carriers.extend(chosen.into_iter().map(|c| (k, c)));
            }
            if !carriers.is_empty() {
                run_transfers(grid, splits, dir, carriers, schedule, scratch);
            }
        }
    }
    nodes
}

/// Picks up to `target` carriers, nearest the boundary first, using the
/// smallest step count whose total column capacity reaches the target.
fn select_carriers(grid: &OccupancyGrid, split: &Split, dir: i8, target: usize) -> Vec<Coord> {
    let axis = split.axis;
    let a = axis.index();
    let src = split.source(dir);
    let dst = split.destination(dir);
    // Source positions ordered nearest to the boundary first.
    let src_order: Vec<usize> = if dir > 0 {
        (src.0..=src.1).rev().collect()
    } else {
        (src.0..=src.1).collect()
    };

    struct Column {
        base: Coord,
        /// (position along the split axis, distance to the boundary)
        atoms: Vec<(usize, usize)>,
        vacancies: usize,
    }

    let other = if axis == Axis::Y { Axis::Z } else { Axis::Y };
    let (o_lo, o_hi) = split.block.range(other);
    let mut columns = Vec::new();
    for o in o_lo..=o_hi {
        for x in 0..grid.extent(Axis::X) {
            let mut base = [x, 0, 0];
            base[other.index()] = o;
            let mut atoms = Vec::new();
            for (dist, &p) in src_order.iter().enumerate() {
                let mut c = base;
                c[a] = p;
                if grid.is_occupied(c) {
                    atoms.push((p, dist + 1));
                }
            }
            let mut vacancies = 0;
            for p in dst.0..=dst.1 {
                let mut c = base;
                c[a] = p;
                if !grid.is_occupied(c) {
                    vacancies += 1;
                }
            }
            if !atoms.is_empty() && vacancies > 0 {
                columns.push(Column {
                    base,
                    atoms,
                    vacancies,
                });
            }
        }
    }

    let cap = |col: &Column, s: usize| col.atoms.iter().take_while(|&&(_, d)| d <= s).count().min(col.vacancies);
    let total = |s: usize| columns.iter().map(|c| cap(c, s)).sum::<usize>();
    let max_s = src.1 - src.0 + 1;
    let target = target.min(total(max_s));
    let (mut lo, mut hi) = (0, max_s);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if total(mid) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }

    let mut chosen = Vec::with_capacity(target);
    for col in &columns {
        let take = cap(col, lo).min(target - chosen.len());
        for &(p, _) in &col.atoms[..take] {
            let mut c = col.base;
            c[a] = p;
            chosen.push(c);
        }
        if chosen.len() == target {
            break;
        }
    }
    chosen
}

/// Moves every carrier out of its source half, one shared step at a time.
fn run_transfers(
    grid: &mut OccupancyGrid,
    splits: &[Split],
    dir: i8,
    mut carriers: Vec<(usize, Coord)>,
    schedule: &mut Schedule,
    scratch: &mut Scratch,
) {
    let axis = splits[carriers[0].0].axis;
    let a = axis.index();
    let in_source = |k: usize, c: &Coord| {
        let (lo, hi) = splits[k].source(dir);
        (lo..=hi).contains(&c[a])
    };
    loop {
        scratch.next_step();
        let mut pieces: Vec<MobileRun> = Vec::new();
        for &(k, c) in &carriers {
            if !in_source(k, &c) {
                continue;
            }
            let (lo, hi) = splits[k].block.range(axis);
            // Walk to the first vacancy or to a stretch already moving.
            let mut end = c;
            let mut free = false;
            loop {
                let p = end[a] as isize + dir as isize;
                if p < lo as isize || p > hi as isize {
                    break;
                }
                let mut n = end;
                n[a] = p as usize;
                if !grid.is_occupied(n) || scratch.marked(grid.index(n)) {
                    free = true;
                    break;
                }
                end = n;
            }
            if !free {
                debug_assert!(false, "carrier at {c:?} has no vacancy ahead");
                continue;
            }
            let (first, last) = if dir > 0 { (c, end) } else { (end, c) };
            for p in first[a]..=last[a] {
                let mut s = first;
                s[a] = p;
                scratch.mark(grid.index(s));
            }
            pieces.push(MobileRun {
                start: first,
                len: last[a] - first[a] + 1,
            });
        }
        if pieces.is_empty() {
            break;
        }
        let runs = merge_runs(pieces, a);
        let atoms = runs.iter().map(|r| r.len).sum();
        for c in carriers.iter_mut() {
            if scratch.marked(grid.index(c.1)) {
                c.1[a] = (c.1[a] as isize + dir as isize) as usize;
            }
        }
        shift_runs(grid, axis, dir, &runs);
        schedule.push(CompactionStep {
            axis,
            direction: dir,
            runs,
            atoms,
        });
    }
}

/// Sorts pieces along their lines and joins touching ones.
fn merge_runs(mut pieces: Vec<MobileRun>, a: usize) -> Vec<MobileRun> {
    let line = |r: &MobileRun| {
        let mut k = r.start;
        k[a] = 0;
        (k[2], k[1], k[0], r.start[a])
    };
    pieces.sort_by_key(line);
    let mut out: Vec<MobileRun> = Vec::with_capacity(pieces.len());
    for r in pieces {
        if let Some(prev) = out.last_mut() {
            let (pl, rl) = (line(prev), line(&r));
            if (pl.0, pl.1, pl.2) == (rl.0, rl.1, rl.2) && prev.start[a] + prev.len >= r.start[a] {
                let end = (prev.start[a] + prev.len).max(r.start[a] + r.len);
                prev.len = end - prev.start[a];
                continue;
            }
        }
        out.push(r);
    }
    out
}

/// Applies a step to the planner's working copy. Runs in these schedules
/// are fully occupied, so each is a move of its end atom across the run.
fn shift_runs(grid: &mut OccupancyGrid, axis: Axis, dir: i8, runs: &[MobileRun]) {
    let a = axis.index();
    let stride = grid.stride(axis);
    let mut moves = Vec::with_capacity(runs.len());
    for r in runs {
        let first = grid.index(r.start);
        let last = first + (r.len - 1) * stride;
        if dir > 0 {
            debug_assert!(r.start[a] + r.len < grid.extent(axis));
            moves.push((first, last + stride));
        } else {
            debug_assert!(r.start[a] > 0);
            moves.push((last, first - stride));
        }
    }
    let occ = grid.occupancy_mut();
    for (from, to) in moves {
        occ[from] = false;
        occ[to] = true;
    }
}
