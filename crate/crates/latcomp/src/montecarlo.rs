//! Planner cost statistics over random lattices.

use latcomp_core::lattice::{is_compacted, random_fill};
use latcomp_core::planner::{ceil_log2, plan, worst_case_bound};
use latcomp_core::simulator::execute;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::formats::Table;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub atoms: usize,
    pub total: usize,
    pub balance: usize,
    pub row: usize,
    pub depth: Option<usize>,
    pub fallback: bool,
    pub compacted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub dims: usize,
    pub n: usize,
    pub p_occ: f64,
    pub trials: usize,
    pub mean_total: f64,
    pub std_total: f64,
    /// Standard error of `mean_total`.
    pub stderr_total: f64,
    pub max_total: usize,
    pub mean_balance: f64,
    pub mean_row: f64,
    pub worst_case_bound: usize,
    /// Allowance on top of the bound: 2⌈log₂ n⌉ (2-D), 4⌈log₂ n⌉ (3-D).
    pub slack: usize,
    /// Routable trials whose total exceeds bound + slack.
    pub over_bound: Vec<usize>,
    /// Trials where balancing needed a second routing pass.
    pub fallback_trials: Vec<usize>,
    pub not_compacted: Vec<usize>,
}

/// Seed of one trial, independent of how trials are split across workers.
pub fn trial_seed(base: u64, n: usize, trial: usize) -> u64 {
    // SplitMix64 finalizer over the combined index.
    let mut z = base ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (trial as u64).wrapping_mul(0xd1b5_4a32_d192_ed03);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn extents(dims: usize, n: usize) -> Result<Vec<usize>> {
    match dims {
        1..=3 => Ok(vec![n; dims]),
        _ => Err(CliError::parse("dims must be 1, 2 or 3")),
    }
}

/// Plans and executes one random lattice.
pub fn run_trial(dims: usize, n: usize, p_occ: f64, seed: u64, trial: usize) -> Result<TrialResult> {
    let grid = random_fill(&extents(dims, n)?, p_occ, seed).map_err(CliError::parse)?;
    let schedule = plan(&grid);
    let report = execute(&grid, &schedule)?;
    let balance = schedule.balance();
    let balance_cost = balance.map_or(0, |b| b.shift_cost);
    Ok(TrialResult {
        trial,
        seed,
        n,
        atoms: grid.atom_count(),
        total: report.shift_cost,
        balance: balance_cost,
        row: report.shift_cost - balance_cost,
        depth: balance.map(|b| b.depth),
        fallback: balance.is_some_and(|b| b.fallback),
        compacted: is_compacted(&report.final_grid),
    })
}

/// All trials for one size, in trial order whatever the worker count.
pub fn run_trials(dims: usize, n: usize, p_occ: f64, trials: usize, base_seed: u64) -> Result<Vec<TrialResult>> {
    if trials == 0 {
        return Err(CliError::parse("trials must be at least 1"));
    }
    (0..trials).into_par_iter().map(|t| run_trial(dims, n, p_occ, trial_seed(base_seed, n, t), t)).collect()
}

pub fn summarize(dims: usize, p_occ: f64, results: &[TrialResult]) -> Summary {
    let n = results.first().map_or(0, |r| r.n);
    let count = results.len() as f64;
    let mean = |f: &dyn Fn(&TrialResult) -> f64| results.iter().map(f).sum::<f64>() / count;
    let mean_total = mean(&|r| r.total as f64);
    let var = if results.len() > 1 {
        results.iter().map(|r| (r.total as f64 - mean_total).powi(2)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    let bound = worst_case_bound(dims, n);
    let slack = match dims {
        2 => 2 * ceil_log2(n),
        3 => 4 * ceil_log2(n),
        _ => 0,
    };
    Summary {
        dims,
        n,
        p_occ,
        trials: results.len(),
        mean_total,
        std_total: var.sqrt(),
        stderr_total: (var / count).sqrt(),
        max_total: results.iter().map(|r| r.total).max().unwrap_or(0),
        mean_balance: mean(&|r| r.balance as f64),
        mean_row: mean(&|r| r.row as f64),
        worst_case_bound: bound,
        slack,
        over_bound: results.iter().filter(|r| !r.fallback && r.total > bound + slack).map(|r| r.trial).collect(),
        fallback_trials: results.iter().filter(|r| r.fallback).map(|r| r.trial).collect(),
        not_compacted: results.iter().filter(|r| !r.compacted).map(|r| r.trial).collect(),
    }
}

pub fn trials_table(results: &[TrialResult]) -> Table {
    let mut t = Table::new(&["n", "trial", "seed", "atoms", "total", "balance", "row", "depth", "fallback", "compacted"]);
    for r in results {
        t.push(vec![
            json!(r.n),
            json!(r.trial),
            json!(r.seed),
            json!(r.atoms),
            json!(r.total),
            json!(r.balance),
            json!(r.row),
            json!(r.depth),
            json!(r.fallback),
            json!(r.compacted),
        ]);
    }
    t
}
