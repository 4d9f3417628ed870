//! Parallel drivers for shift sweeps and bound-state tables.

use latcomp_core::potential::{harmonic_frequency, potential, LatticeParams};
use latcomp_core::shift::{
    analytic_fidelity, analytic_heating, optimal_timing, simulate_shift, sweep_point, GridConfig, ShiftExperiment, SweepVariable,
};
use latcomp_core::spectral::{bound_states, SpatialGrid, TrajectoryPoint, Wavefunction};
use latcomp_core::units::{angular_to_khz, joule_to_khz, joule_to_microkelvin, microkelvin_to_joule, millisecond};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{EigenConfig, SweepAxis, SweepConfig};
use crate::error::{CliError, Result};
use crate::formats::Table;

pub const SHIFT_COLUMNS: [&str; 12] = [
    "parameter",
    "dE_max_uK",
    "fidelity",
    "tau_optimal_flag",
    "tau_ms",
    "final_dE_uK",
    "final_fidelity",
    "min_ramp_fidelity",
    "analytic_dE_max_uK",
    "analytic_fidelity",
    "norm_drift",
    "steps",
];

pub const FREQUENCY_COLUMNS: [&str; 4] = ["parameter", "nu01_kHz", "nu_harmonic_kHz", "depth_uK"];

/// Output of one sweep: the table and, if requested, one trajectory per row.
pub struct SweepOutput {
    pub table: Table,
    pub trajectories: Vec<Vec<TrajectoryPoint>>,
}

fn template(cfg: &SweepConfig, params: LatticeParams) -> Result<ShiftExperiment> {
    let tau = match (cfg.variable, cfg.tau_ms) {
        (SweepAxis::TauMs, _) => 1e-3,
        (_, Some(ms)) => millisecond(ms),
        (_, None) => return Err(CliError::parse("tau_ms is required unless the duration is swept")),
    };
    let mut exp = ShiftExperiment::new(params, tau);
    let defaults = GridConfig::default();
    exp.grid = GridConfig {
        periods: cfg.periods.unwrap_or(defaults.periods),
        points_per_period: cfg.points_per_period.unwrap_or(defaults.points_per_period),
    };
    exp.fidelity_samples = cfg.fidelity_samples;
    Ok(exp)
}

fn shift_row(template: &ShiftExperiment, cfg: &SweepConfig, value: f64) -> Result<(Vec<serde_json::Value>, Vec<TrajectoryPoint>)> {
    let (variable, core_value) = match cfg.variable {
        SweepAxis::TauMs => (SweepVariable::Tau, millisecond(value)),
        SweepAxis::DepthUk => (SweepVariable::Depth, microkelvin_to_joule(value)),
        SweepAxis::Ratio => (SweepVariable::Ratio, value),
        SweepAxis::ThetaRad => unreachable!("frequency sweeps do not propagate"),
    };
    let mut exp = sweep_point(template, variable, core_value)?;
    if cfg.optimize_timing {
        exp.tau = optimal_timing(exp.tau, &exp.params)?;
    }
    let r = simulate_shift(&exp)?;
    let opt = optimal_timing(exp.tau, &exp.params)?;
    let (_, e2) = analytic_heating(exp.tau, &exp.params);
    let row = vec![
        json!(value),
        json!(joule_to_microkelvin(r.max_heating)),
        json!(r.fidelity),
        json!((opt - exp.tau).abs() <= 1e-9 * exp.tau),
        json!(exp.tau * 1e3),
        json!(joule_to_microkelvin(r.final_heating)),
        json!(r.final_fidelity),
        json!(r.min_ramp_fidelity),
        json!(joule_to_microkelvin(e2)),
        json!(analytic_fidelity(exp.tau, &exp.params)?),
        json!(r.norm_drift),
        json!(r.steps),
    ];
    let traj = if cfg.trajectories { r.trajectory } else { Vec::new() };
    Ok((row, traj))
}

/// ν01 from the two lowest bound states of one lattice period at θ.
pub fn transition_frequency_khz(params: &LatticeParams, theta: f64, points_per_period: usize) -> Result<f64> {
    let grid = SpatialGrid::lattice(params.a, 1, points_per_period)?;
    let u: Vec<f64> = grid.positions().map(|x| potential(x, theta, params, 1.0)).collect();
    let states = bound_states(&grid, params.mass(), &u, 2)?;
    Ok(joule_to_khz(states[1].0 - states[0].0))
}

fn frequency_row(params: &LatticeParams, theta: f64, points_per_period: usize) -> Result<Vec<serde_json::Value>> {
    Ok(vec![
        json!(theta),
        json!(transition_frequency_khz(params, theta, points_per_period)?),
        json!(angular_to_khz(harmonic_frequency(params, theta)?)),
        json!(joule_to_microkelvin(params.depth(theta))),
    ])
}

/// Runs a sweep; rows come back in the order of `cfg.values`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    let params = cfg.lattice.params()?;
    let values = cfg.values.to_vec();
    if cfg.variable == SweepAxis::ThetaRad {
        let ppp = cfg.points_per_period.unwrap_or(128);
        let rows: Vec<_> = values.par_iter().map(|&th| frequency_row(&params, th, ppp)).collect::<Result<_>>()?;
        let mut table = Table::new(&FREQUENCY_COLUMNS);
        rows.into_iter().for_each(|r| table.push(r));
        return Ok(SweepOutput {
            table,
            trajectories: Vec::new(),
        });
    }
    let tmpl = template(cfg, params)?;
    let rows: Vec<_> = values.par_iter().map(|&v| shift_row(&tmpl, cfg, v)).collect::<Result<_>>()?;
    let mut table = Table::new(&SHIFT_COLUMNS);
    let mut trajectories = Vec::new();
    for (row, traj) in rows {
        table.push(row);
        if cfg.trajectories {
            trajectories.push(traj);
        }
    }
    Ok(SweepOutput { table, trajectories })
}

/// Bound-state ladder and the ground state.
pub fn run_eigen(cfg: &EigenConfig) -> Result<(Table, Wavefunction)> {
    let params = cfg.lattice.params()?;
    let grid = SpatialGrid::lattice(params.a, cfg.periods, cfg.points_per_period)?;
    let u: Vec<f64> = grid.positions().map(|x| potential(x, cfg.theta_rad, &params, 1.0)).collect();
    let mut states = bound_states(&grid, params.mass(), &u, cfg.n_states.max(1))?;
    let harmonic = angular_to_khz(harmonic_frequency(&params, cfg.theta_rad)?);
    let mut table = Table::new(&["n", "E_uK", "nu_to_next_kHz", "nu_harmonic_kHz", "relative_deviation"]);
    for i in 0..states.len() {
        let next = states.get(i + 1).map(|s| joule_to_khz(s.0 - states[i].0));
        table.push(vec![
            json!(i),
            json!(joule_to_microkelvin(states[i].0)),
            json!(next),
            json!(harmonic),
            json!(next.map(|v| (harmonic - v) / harmonic)),
        ]);
    }
    let ground = states.swap_remove(0).1;
    Ok((table, ground))
}
