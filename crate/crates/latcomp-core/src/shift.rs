//! Heating and fidelity of a single shift.
//!
//! Rotating the polarization angle θ by π drags every well by half a lattice
//! constant. An atom that starts in the motional ground state is propagated
//! on a Fourier grid while θ follows the ramp, and the run reports:
//!
//! * `max_heating`: the largest `<H(t)> - E_g(θ(t))`, energy above the
//!   instantaneous ground state of the moving well;
//! * `fidelity`: the smallest overlap with the ground state of the moving
//!   well, taken in the well's own frame (ground state boosted by the well
//!   velocity);
//! * `final_heating` / `final_fidelity`: the same two quantities once the
//!   well has stopped.
//!
//! In a harmonic well moving at constant speed v (U0 = U1) the atom becomes
//! a coherent state: the heating oscillates as `m v² (1 - cos ωt)`, peaking
//! at `2 m v²`, and the moving-frame fidelity is `exp(-m v² / 2ħω)`. These
//! closed forms are in [`analytic_heating`] and [`analytic_fidelity`].

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::potential::{harmonic_frequency, minimum_trajectory, LatticeParams, PotentialError};
use crate::spectral::{propagate_time_dependent, ChebyshevConfig, Hamiltonian, SpatialGrid, SpectralError, TrajectoryPoint, Wavefunction};
use crate::units::HBAR;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShiftError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("invalid shift experiment: {0}")]
    Invalid(&'static str),
}

/// Progress of the rotation as a function of normalized time `s ∈ [0, 1]`.
#[derive(Debug, Clone, Copy)]
pub enum Ramp {
    /// θ = β t.
    Linear,
    /// Any monotone map with `f(0) = 0` and `f(1) = 1`.
    Custom(fn(f64) -> f64),
}

impl Ramp {
    pub fn progress(&self, s: f64) -> f64 {
        match self {
            Ramp::Linear => s,
            Ramp::Custom(f) => f(s),
        }
    }

    /// d(progress)/ds.
    pub fn rate(&self, s: f64) -> f64 {
        match self {
            Ramp::Linear => 1.0,
            Ramp::Custom(f) => {
                let h = 1e-6;
                let (a, b) = ((s - h).max(0.0), (s + h).min(1.0));
                (f(b) - f(a)) / (b - a)
            }
        }
    }
}

/// Box size and resolution of a shift simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub periods: usize,
    pub points_per_period: usize,
}

impl Default for GridConfig {
    /// Four lattice periods of 256 points: the smallest power-of-two box
    /// holding at least three periods at that resolution.
    fn default() -> Self {
        Self {
            periods: 4,
            points_per_period: 256,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShiftExperiment {
    pub params: LatticeParams,
    /// Duration of the rotation, s.
    pub tau: f64,
    pub theta_start: f64,
    pub theta_end: f64,
    /// Sign of the state-dependent term, +1 or -1.
    pub sign: f64,
    pub ramp: Ramp,
    pub grid: GridConfig,
    /// Propagation step; `None` means ħ / U0.
    pub dt: Option<f64>,
    /// Energy is recorded every this many steps.
    pub sample_every: usize,
    /// Number of moving-frame fidelity evaluations along the ramp.
    pub fidelity_samples: usize,
}

impl ShiftExperiment {
    /// θ: 0 → π with the positive sign, linear ramp.
    pub fn new(params: LatticeParams, tau: f64) -> Self {
        Self {
            params,
            tau,
            theta_start: 0.0,
            theta_end: PI,
            sign: 1.0,
            ramp: Ramp::Linear,
            grid: GridConfig::default(),
            dt: None,
            sample_every: 4,
            fidelity_samples: 256,
        }
    }

    /// The second half of a shift cycle: opposite sign, θ: π → 0. The well
    /// keeps moving in the same direction.
    pub fn return_leg(&self) -> Self {
        Self {
            theta_start: self.theta_end,
            theta_end: self.theta_start,
            sign: -self.sign,
            ..self.clone()
        }
    }

    pub fn time_step(&self) -> f64 {
        self.dt.unwrap_or(HBAR / self.params.u0)
    }

    fn theta(&self, t: f64) -> f64 {
        let s = (t / self.tau).clamp(0.0, 1.0);
        self.theta_start + (self.theta_end - self.theta_start) * self.ramp.progress(s)
    }

    fn theta_rate(&self, t: f64) -> f64 {
        let s = (t / self.tau).clamp(0.0, 1.0);
        (self.theta_end - self.theta_start) * self.ramp.rate(s) / self.tau
    }

    fn well_position(&self, theta: f64) -> f64 {
        minimum_trajectory(theta, &self.params, self.sign)
    }

    /// Velocity of the well minimum at time t (inside the ramp).
    fn well_velocity(&self, t: f64) -> f64 {
        let th = self.theta(t);
        self.params.phase_rate(th, self.sign) * self.theta_rate(t) / (2.0 * self.params.k())
    }

    fn validate(&self) -> Result<(), ShiftError> {
        if !(self.tau > 0.0) {
            return Err(ShiftError::Invalid("tau must be positive"));
        }
        if self.sign != 1.0 && self.sign != -1.0 {
            return Err(ShiftError::Invalid("sign must be +1 or -1"));
        }
        if self.grid.periods < 1 || self.grid.points_per_period < 64 {
            return Err(ShiftError::Invalid("grid needs at least 64 points per lattice period"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ShiftResult {
    pub tau: f64,
    /// J.
    pub max_heating: f64,
    /// J, after the well has stopped.
    pub final_heating: f64,
    /// Overlap of the state at the end of the ramp with the ground state of
    /// the well still moving at its final velocity. The stop kick is left
    /// out, so this does not depend on the motional phase at the stop.
    pub fidelity: f64,
    /// Smallest moving-frame ground-state overlap anywhere along the ramp.
    pub min_ramp_fidelity: f64,
    /// Ground-state overlap once the well has stopped.
    pub final_fidelity: f64,
    /// Largest |norm - 1| along the run.
    pub norm_drift: f64,
    pub steps: usize,
    pub dt: f64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub final_state: Wavefunction,
    /// Centre of the well holding the atom at the end, m.
    pub final_centre: f64,
}

/// Ground state of one well `-R cos(2kx)`, expanded in the even functions
/// `1/√a` and `√(2/a) cos(2knx)`, n = 1..=64.
#[derive(Debug, Clone)]
pub struct WellGroundState {
    pub energy: f64,
    coeffs: Vec<f64>,
    k: f64,
    a: f64,
}

const WELL_BASIS: usize = 64;

impl WellGroundState {
    /// Energy is absolute: the bottom of the well sits at `-amplitude`.
    pub fn solve(params: &LatticeParams, amplitude: f64) -> Result<Self, ShiftError> {
        let k = params.k();
        let n = WELL_BASIS + 1;
        let recoil = HBAR * HBAR * (2.0 * k) * (2.0 * k) / (2.0 * params.mass());
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = recoil * (i * i) as f64;
            if i + 1 < n {
                let c = if i == 0 { -amplitude / core::f64::consts::SQRT_2 } else { -amplitude / 2.0 };
                h[(i, i + 1)] = c;
                h[(i + 1, i)] = c;
            }
        }
        let eig = SymmetricEigen::try_new(h, 1e-15, 0).ok_or(SpectralError::ConvergenceFailure)?;
        let idx = (0..n).min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).unwrap_or(0);
        let mut coeffs: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        if coeffs[0] < 0.0 {
            for c in coeffs.iter_mut() {
                *c = -*c;
            }
        }
        Ok(Self {
            energy: eig.eigenvalues[idx],
            coeffs,
            k,
            a: params.a,
        })
    }

    /// Amplitude at offset `x` from the well centre, zero beyond ±a/2.
    pub fn amplitude(&self, x: f64) -> f64 {
        if libm::fabs(x) > self.a / 2.0 {
            return 0.0;
        }
        let mut v = self.coeffs[0] / libm::sqrt(self.a);
        let s = libm::sqrt(2.0 / self.a);
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            v += c * s * libm::cos(2.0 * self.k * n as f64 * x);
        }
        v
    }

    /// Normalized grid state centred at `centre` and moving at `velocity`.
    pub fn on_grid(&self, grid: SpatialGrid, centre: f64, velocity: f64, mass: f64) -> Wavefunction {
        let kv = mass * velocity / HBAR;
        let mut psi = Wavefunction::from_fn(grid, |x| {
            let d = grid.offset(x, centre);
            Complex64::from_polar(self.amplitude(d), kv * d)
        });
        psi.normalize();
        psi
    }
}

/// Ground energy as a function of θ, tabulated and linearly interpolated.
struct GroundTable {
    start: f64,
    end: f64,
    energies: Vec<f64>,
}

const GROUND_TABLE_POINTS: usize = 1025;

impl GroundTable {
    fn new(params: &LatticeParams, start: f64, end: f64) -> Result<Self, ShiftError> {
        let mut energies = Vec::with_capacity(GROUND_TABLE_POINTS);
        if params.is_simplified() {
            let e = WellGroundState::solve(params, params.amplitude(start))?.energy;
            energies.resize(GROUND_TABLE_POINTS, e);
        } else {
            for i in 0..GROUND_TABLE_POINTS {
                let th = start + (end - start) * i as f64 / (GROUND_TABLE_POINTS - 1) as f64;
                energies.push(WellGroundState::solve(params, params.amplitude(th))?.energy);
            }
        }
        Ok(Self { start, end, energies })
    }

    fn at(&self, theta: f64) -> f64 {
        let n = GROUND_TABLE_POINTS - 1;
        let u = ((theta - self.start) / (self.end - self.start)).clamp(0.0, 1.0) * n as f64;
        let i = (libm::floor(u) as usize).min(n - 1);
        let f = u - i as f64;
        self.energies[i] * (1.0 - f) + self.energies[i + 1] * f
    }
}

/// Simulates one rotation starting from the ground state of the first well.
pub fn simulate_shift(exp: &ShiftExperiment) -> Result<ShiftResult, ShiftError> {
    run_leg(exp, None)
}

/// Runs `exp` from `initial` (state and centre of its well), or from the
/// ground state placed so the travel is centred in the box.
fn run_leg(exp: &ShiftExperiment, initial: Option<(&Wavefunction, f64)>) -> Result<ShiftResult, ShiftError> {
    exp.validate()?;
    let p = &exp.params;
    let grid = SpatialGrid::lattice(p.a, exp.grid.periods, exp.grid.points_per_period)?;
    let z_start = exp.well_position(exp.theta_start);
    let z_end = exp.well_position(exp.theta_end);
    let centre = match initial {
        Some((_, c)) => c,
        None => grid.length() / 2.0 - (z_end - z_start) / 2.0,
    };
    // Lattice coordinates are shifted so the well at z_start lands on `centre`.
    let origin = centre - z_start;
    let two_k = 2.0 * p.k();
    let cos_tab: Vec<f64> = grid.positions().map(|x| libm::cos(two_k * (x - origin))).collect();
    let sin_tab: Vec<f64> = grid.positions().map(|x| libm::sin(two_k * (x - origin))).collect();
    let potential_at = |t: f64, out: &mut [f64]| {
        let th = exp.theta(t);
        let a = 0.5 * p.u0 * libm::cos(th);
        let b = exp.sign * 0.5 * p.u1 * libm::sin(th);
        for ((o, c), s) in out.iter_mut().zip(&cos_tab).zip(&sin_tab) {
            *o = a * c + b * s;
        }
    };

    let ground_start = WellGroundState::solve(p, p.amplitude(exp.theta_start))?;
    let psi0 = match initial {
        Some((psi, _)) => psi.clone(),
        None => ground_start.on_grid(grid, centre, 0.0, p.mass()),
    };
    let table = GroundTable::new(p, exp.theta_start, exp.theta_end)?;

    let dt = exp.time_step();
    let t_max = {
        let k = HBAR * grid.k_max();
        k * k / (2.0 * p.mass())
    };
    let bound = 0.5 * p.u0.max(p.u1);
    let config = ChebyshevConfig::enclosing(dt, -bound, bound, t_max);
    let steps_estimate = libm::ceil(exp.tau / dt).max(1.0) as usize;
    let sample_every = exp.sample_every.max(1);
    let fid_stride = {
        let per = (steps_estimate / exp.fidelity_samples.max(1)).max(1);
        per.div_ceil(sample_every) * sample_every
    };

    let mut max_heating = f64::NEG_INFINITY;
    let mut min_ramp_fidelity = 1.0f64;
    let mut fidelity = 1.0f64;
    let mut fid_error: Option<ShiftError> = None;
    let traj = propagate_time_dependent(&psi0, p.mass(), potential_at, exp.tau, &config, sample_every, |s| {
        let th = exp.theta(s.time);
        let heating = s.point.energy - table.at(th);
        max_heating = max_heating.max(heating);
        let last = s.time >= exp.tau;
        if s.step % fid_stride == 0 || last {
            // The end point is measured against the well still moving at its
            // final ramp velocity; the stopped well is handled below.
            let ground = match WellGroundState::solve(p, p.amplitude(th)) {
                Ok(g) => g,
                Err(e) => {
                    fid_error = Some(e);
                    return;
                }
            };
            let c = centre + exp.well_position(th) - z_start;
            let reference = ground.on_grid(grid, c, exp.well_velocity(s.time), p.mass());
            let overlap = reference.overlap(s.state);
            min_ramp_fidelity = min_ramp_fidelity.min(overlap);
            if last {
                fidelity = overlap;
            }
        }
    })?;
    if let Some(e) = fid_error {
        return Err(e);
    }

    let final_centre = centre + z_end - z_start;
    let ground_end = WellGroundState::solve(p, p.amplitude(exp.theta_end))?;
    let stopped = ground_end.on_grid(grid, final_centre, 0.0, p.mass());
    let final_fidelity = stopped.overlap(&traj.final_state);
    let final_energy = traj.points.last().map_or(0.0, |pt| pt.energy);

    Ok(ShiftResult {
        tau: exp.tau,
        max_heating: max_heating.max(0.0),
        final_heating: final_energy - ground_end.energy,
        fidelity,
        min_ramp_fidelity,
        final_fidelity,
        norm_drift: traj.max_norm_drift,
        steps: traj.steps,
        dt: traj.dt,
        trajectory: traj.points,
        final_state: traj.final_state,
        final_centre,
    })
}

/// Both halves of a shift cycle and the summed per-leg heating.
#[derive(Debug, Clone)]
pub struct CycleResult {
    pub legs: Vec<ShiftResult>,
    /// Sum of the legs' `max_heating`.
    pub total_max_heating: f64,
}

/// Runs `exp` and then its return leg from the state it left behind.
pub fn simulate_cycle(exp: &ShiftExperiment) -> Result<CycleResult, ShiftError> {
    consecutive_shifts(&[exp.clone(), exp.return_leg()])
}

/// Chains legs, each starting from the previous leg's final state.
pub fn consecutive_shifts(legs: &[ShiftExperiment]) -> Result<CycleResult, ShiftError> {
    let mut results: Vec<ShiftResult> = Vec::with_capacity(legs.len());
    for leg in legs {
        let r = match results.last() {
            None => run_leg(leg, None)?,
            Some(prev) => run_leg(leg, Some((&prev.final_state, prev.final_centre)))?,
        };
        results.push(r);
    }
    let total_max_heating = results.iter().map(|r| r.max_heating).sum();
    Ok(CycleResult {
        legs: results,
        total_max_heating,
    })
}

/// `(E, 2E)` with `E = m (Δz/τ)²`, Δz = a/2.
pub fn analytic_heating(tau: f64, params: &LatticeParams) -> (f64, f64) {
    let v = params.a / 2.0 / tau;
    let e = params.mass() * v * v;
    (e, 2.0 * e)
}

/// Heating left after the well stops at time τ in a harmonic well,
/// `E (1 - cos ωτ)`.
pub fn analytic_final_heating(tau: f64, params: &LatticeParams) -> Result<f64, ShiftError> {
    let w = harmonic_frequency(params, 0.0)?;
    Ok(analytic_heating(tau, params).0 * (1.0 - libm::cos(w * tau)))
}

/// `exp(-(m / 2ωħ) (Δz/τ)²)`.
pub fn analytic_fidelity(tau: f64, params: &LatticeParams) -> Result<f64, ShiftError> {
    let w = harmonic_frequency(params, 0.0)?;
    let v = params.a / 2.0 / tau;
    Ok(libm::exp(-params.mass() * v * v / (2.0 * w * HBAR)))
}

/// Mean vibrational frequency over a linear θ: 0 → π ramp, (1/π) ∫ ω(θ) dθ.
pub fn mean_frequency(params: &LatticeParams) -> Result<f64, ShiftError> {
    if params.is_simplified() {
        return Ok(harmonic_frequency(params, 0.0)?);
    }
    // Simpson's rule; ω(θ) is smooth.
    let n = 512;
    let h = PI / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let w = harmonic_frequency(params, i as f64 * h)?;
        let weight = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += weight * w;
    }
    Ok(sum * h / 3.0 / PI)
}

/// Duration nearest `tau_target` that holds a whole number (at least one)
/// of vibrational periods, so the stop cancels the start kick.
pub fn optimal_timing(tau_target: f64, params: &LatticeParams) -> Result<f64, ShiftError> {
    if !(tau_target > 0.0) {
        return Err(ShiftError::Invalid("tau must be positive"));
    }
    let period = 2.0 * PI / mean_frequency(params)?;
    let n = libm::round(tau_target / period).max(1.0);
    Ok(n * period)
}

/// Duration nearest `tau_target` holding a whole number of periods plus a
/// half: the worst case for residual heating.
pub fn worst_timing(tau_target: f64, params: &LatticeParams) -> Result<f64, ShiftError> {
    let period = 2.0 * PI / mean_frequency(params)?;
    let n = libm::floor(tau_target / period).max(0.0);
    Ok((n + 0.5) * period)
}

/// Parameter varied in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Duration, s.
    Tau,
    /// Depth U0, J (U1 follows the template's ratio).
    Depth,
    /// Ratio r = U0 / U1.
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub max_heating: f64,
    pub final_heating: f64,
    pub fidelity: f64,
    pub min_ramp_fidelity: f64,
    pub final_fidelity: f64,
    /// True when τ is a whole number of mean vibrational periods.
    pub tau_optimal: bool,
}

/// The experiment for one sweep point.
pub fn sweep_point(template: &ShiftExperiment, variable: SweepVariable, value: f64) -> Result<ShiftExperiment, ShiftError> {
    let mut exp = template.clone();
    match variable {
        SweepVariable::Tau => exp.tau = value,
        SweepVariable::Depth => {
            let r = template.params.ratio();
            exp.params = LatticeParams::with_ratio(value, template.params.a, template.params.atom, r)?;
        }
        SweepVariable::Ratio => {
            exp.params = LatticeParams::with_ratio(template.params.u0, template.params.a, template.params.atom, value)?;
        }
    }
    Ok(exp)
}

/// Runs one sweep point.
pub fn sweep_row(template: &ShiftExperiment, variable: SweepVariable, value: f64) -> Result<SweepRow, ShiftError> {
    let exp = sweep_point(template, variable, value)?;
    let r = simulate_shift(&exp)?;
    let opt = optimal_timing(exp.tau, &exp.params)?;
    Ok(SweepRow {
        value,
        max_heating: r.max_heating,
        final_heating: r.final_heating,
        fidelity: r.fidelity,
        min_ramp_fidelity: r.min_ramp_fidelity,
        final_fidelity: r.final_fidelity,
        tau_optimal: libm::fabs(opt - exp.tau) <= 1e-9 * exp.tau,
    })
}

/// Runs every point in order. An empty range gives an empty table.
pub fn sweep(template: &ShiftExperiment, variable: SweepVariable, values: &[f64]) -> Result<Vec<SweepRow>, ShiftError> {
    values.iter().map(|&v| sweep_row(template, variable, v)).collect()
}

/// Splits residual heating sampled over increasing τ into a smooth part
/// (the lower envelope through the local minima, from the acceleration of
/// the well) and the oscillating remainder (from the timing of the stop).
pub fn decompose_heating(taus: &[f64], heating: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = taus.len().min(heating.len());
    let mut minima: Vec<usize> = (1..n.saturating_sub(1))
        .filter(|&i| heating[i] <= heating[i - 1] && heating[i] <= heating[i + 1])
        .collect();
    if minima.is_empty() {
        let i = (0..n).min_by(|&a, &b| heating[a].total_cmp(&heating[b])).unwrap_or(0);
        minima.push(i);
    }
    let envelope: Vec<f64> = (0..n)
        .map(|i| {
            let t = taus[i];
            let after = minima.iter().position(|&m| taus[m] >= t);
            let e = match after {
                Some(0) => heating[minima[0]],
                None => heating[*minima.last().unwrap_or(&0)],
                Some(j) => {
                    let (a, b) = (minima[j - 1], minima[j]);
                    let f = (t - taus[a]) / (taus[b] - taus[a]);
                    heating[a] + f * (heating[b] - heating[a])
                }
            };
            e.min(heating[i])
        })
        .collect();
    let oscillatory = (0..n).map(|i| heating[i] - envelope[i]).collect();
    (envelope, oscillatory)
}

/// Ground-state energy of the well at θ, on the given grid, from the dense
/// grid Hamiltonian. Used to cross-check the single-well basis.
pub fn grid_ground_energy(params: &LatticeParams, theta: f64, grid: SpatialGrid) -> Result<f64, ShiftError> {
    let u: Vec<f64> = grid.positions().map(|x| crate::potential::potential(x, theta, params, 1.0)).collect();
    let states = crate::spectral::bound_states(&grid, params.mass(), &u, 1)?;
    Ok(states[0].0)
}

/// Energy of a grid state under the static lattice at θ.
pub fn static_energy(params: &LatticeParams, theta: f64, sign: f64, psi: &Wavefunction) -> Result<f64, ShiftError> {
    let grid = *psi.grid();
    let u: Vec<f64> = grid.positions().map(|x| crate::potential::potential(x, theta, params, sign)).collect();
    let mut h = Hamiltonian::new(grid, params.mass(), u)?;
    Ok(h.expectation(psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::AtomSpecies;
    use crate::units::{joule_to_microkelvin, microkelvin_to_joule};

    fn simplified() -> LatticeParams {
        LatticeParams::simplified(microkelvin_to_joule(100.0), 5.3e-6, AtomSpecies::cesium()).unwrap()
    }

    #[test]
    fn heating_formula() {
        let p = simplified();
        let (e, e2) = analytic_heating(1e-3, &p);
        let v: f64 = 2.65e-3;
        assert!((e - p.mass() * v * v).abs() < 1e-12 * e);
        assert_eq!(e2, 2.0 * e);
        let (e_long, _) = analytic_heating(2e-3, &p);
        assert!((e_long - e / 4.0).abs() < 1e-12 * e);
        assert!(analytic_heating(1e6, &p).0 < 1e-40);
    }

    #[test]
    fn fidelity_formula_limits() {
        let p = simplified();
        assert!(analytic_fidelity(1e3, &p).unwrap() > 1.0 - 1e-12);
        assert!(analytic_fidelity(2e-3, &p).unwrap() > 0.97);
        assert!(analytic_fidelity(6e-3, &p).unwrap() > 0.99);
        assert!(analytic_fidelity(0.5e-3, &p).unwrap() < 0.85);
        // Independent arithmetic: m v² / (2 ħ ω) with ω = k sqrt(2 U0 / m).
        let w = (PI / 5.3e-6) * libm::sqrt(2.0 * p.u0 / p.mass());
        let v = 2.65e-6 / 2e-3;
        let expected = libm::exp(-p.mass() * v * v / (2.0 * HBAR * w));
        assert!((analytic_fidelity(2e-3, &p).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn timing_snaps_to_whole_periods() {
        let p = simplified();
        let period = 2.0 * PI / harmonic_frequency(&p, 0.0).unwrap();
        let t = optimal_timing(7.0 * period, &p).unwrap();
        assert!((t - 7.0 * period).abs() < 1e-12 * t);
        let t = optimal_timing(1e-3, &p).unwrap();
        let n = libm::round(t / period);
        assert!(n == 10.0 || n == 11.0, "n = {n}");
        assert!((t / period - n).abs() < 1e-9);
    }

    #[test]
    fn well_ground_state_near_harmonic() {
        let p = simplified();
        let g = WellGroundState::solve(&p, p.u0 / 2.0).unwrap();
        let w = harmonic_frequency(&p, 0.0).unwrap();
        // E0 ≈ -U0/2 + ħω/2 - ħ²k²/(8m) to first order in the quartic term.
        let k = p.k();
        let expected = -p.u0 / 2.0 + HBAR * w / 2.0 - HBAR * HBAR * k * k / (8.0 * p.mass());
        assert!((g.energy - expected).abs() < 1e-3 * HBAR * w, "{} vs {}", joule_to_microkelvin(g.energy), joule_to_microkelvin(expected));
    }

    #[test]
    fn basis_ground_energy_matches_grid() {
        let p = LatticeParams::cesium(100.0, 5.3).unwrap();
        let grid = SpatialGrid::lattice(p.a, 1, 128).unwrap();
        for th in [0.0, 1.0, PI / 2.0] {
            let basis = WellGroundState::solve(&p, p.amplitude(th)).unwrap().energy;
            let dense = grid_ground_energy(&p, th, grid).unwrap();
            assert!((basis - dense).abs() < 1e-9 * p.u0, "theta {th}");
        }
    }

    #[test]
    fn linear_ramp_moves_well_at_constant_speed() {
        let exp = ShiftExperiment::new(simplified(), 1e-3);
        let v = exp.params.a / 2.0 / exp.tau;
        for t in [0.0, 0.3e-3, 0.9e-3] {
            assert!((exp.well_velocity(t) - v).abs() < 1e-12 * v);
        }
        let back = exp.return_leg();
        assert!((back.well_velocity(0.5e-3) - v).abs() < 1e-12 * v);
    }

    #[test]
    fn custom_ramp_rate() {
        let r = Ramp::Custom(|s| s * s);
        assert!((r.rate(0.5) - 1.0).abs() < 1e-6);
        assert_eq!(r.progress(1.0), 1.0);
    }

    #[test]
    fn decomposition_recovers_envelope() {
        let taus: Vec<f64> = (0..200).map(|i| 0.5 + i as f64 * 0.01).collect();
        let smooth = |t: f64| 1.0 / (t * t);
        let heating: Vec<f64> = taus.iter().map(|&t| smooth(t) + 0.5 * (1.0 - libm::cos(2.0 * PI * t / 0.1))).collect();
        let (env, osc) = decompose_heating(&taus, &heating);
        for i in 20..180 {
            assert!((env[i] - smooth(taus[i])).abs() < 0.05, "i = {i}");
            assert!(osc[i] >= 0.0);
        }
    }

    #[test]
    fn empty_sweep_is_empty() {
        let exp = ShiftExperiment::new(simplified(), 1e-3);
        assert!(sweep(&exp, SweepVariable::Tau, &[]).unwrap().is_empty());
    }

    #[test]
    fn short_simplified_shift_matches_coherent_state() {
        // Coarse grid and short ramp so the test stays quick; the full
        // comparison lives in the acceptance suite.
        let mut exp = ShiftExperiment::new(simplified(), 0.3e-3);
        exp.grid = GridConfig {
            periods: 1,
            points_per_period: 128,
        };
        let r = simulate_shift(&exp).unwrap();
        let (_, e2) = analytic_heating(exp.tau, &exp.params);
        assert!((r.max_heating - e2).abs() / e2 < 0.03, "{} vs {}", r.max_heating, e2);
        let f = analytic_fidelity(exp.tau, &exp.params).unwrap();
        assert!((r.fidelity - f).abs() / f < 0.05, "{} vs {}", r.fidelity, f);
        assert!(r.norm_drift < 1e-9);
    }
}
