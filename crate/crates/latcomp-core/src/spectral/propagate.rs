use alloc::vec::Vec;

use super::chebyshev::{ChebyshevConfig, ChebyshevPropagator};
use super::grid::Wavefunction;
use super::hamiltonian::Hamiltonian;
use super::SpectralError;

/// One recorded point of a propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub time: f64,
    /// `<H(t)>` against the instantaneous potential.
    pub energy: f64,
    pub norm: f64,
    /// `|<ψ(0)|ψ(t)>|²`.
    pub overlap: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub final_state: Wavefunction,
    pub steps: usize,
    /// Step actually used: the requested Δt shrunk so the steps tile the
    /// total time exactly.
    pub dt: f64,
    /// Largest |norm - 1| seen at any sample.
    pub max_norm_drift: f64,
}

/// What an observer sees at each sample.
pub struct Sample<'a> {
    pub step: usize,
    pub time: f64,
    pub state: &'a Wavefunction,
    pub point: TrajectoryPoint,
}

/// Propagates `psi0` for `total_time` under a potential that is constant
/// within each step and sampled at the step midpoint.
///
/// `potential_at(t, out)` fills the potential samples at time `t`. Every
/// `sample_every` steps (and at both ends) the energy, norm and initial
/// overlap are recorded and `observe` is called.
pub fn propagate_time_dependent<P, O>(
    psi0: &Wavefunction,
    mass: f64,
    mut potential_at: P,
    total_time: f64,
    config: &ChebyshevConfig,
    sample_every: usize,
    mut observe: O,
) -> Result<Trajectory, SpectralError>
where
    P: FnMut(f64, &mut [f64]),
    O: FnMut(&Sample<'_>),
{
    if !(total_time > 0.0) {
        return Err(SpectralError::InvalidConfig("total time must be positive"));
    }
    if !(config.dt > 0.0) {
        return Err(SpectralError::InvalidConfig("time step must be positive"));
    }
    let steps = libm::ceil(total_time / config.dt * (1.0 - 1e-12)).max(1.0) as usize;
    let dt = total_time / steps as f64;
    let grid = *psi0.grid();
    let mut prop = ChebyshevPropagator::new(ChebyshevConfig { dt, ..*config }, grid.len())?;
    let mut ham = Hamiltonian::new(grid, mass, alloc::vec![0.0; grid.len()])?;
    let sample_every = sample_every.max(1);

    let mut psi = psi0.clone();
    let mut points = Vec::new();
    let mut max_norm_drift: f64 = 0.0;
    let mut record = |step: usize, t: f64, psi: &Wavefunction, ham: &mut Hamiltonian, potential_at: &mut P| {
        potential_at(t, ham.potential_mut());
        let point = TrajectoryPoint {
            time: t,
            energy: ham.expectation(psi),
            norm: psi.norm_sqr(),
            overlap: psi0.overlap(psi),
        };
        max_norm_drift = max_norm_drift.max(libm::fabs(point.norm - 1.0));
        observe(&Sample {
            step,
            time: t,
            state: psi,
            point,
        });
        points.push(point);
    };

    record(0, 0.0, &psi, &mut ham, &mut potential_at);
    for i in 0..steps {
        potential_at((i as f64 + 0.5) * dt, ham.potential_mut());
        prop.step(&mut ham, psi.amplitudes_mut())?;
        if (i + 1) % sample_every == 0 || i + 1 == steps {
            let t = if i + 1 == steps { total_time } else { (i + 1) as f64 * dt };
            record(i + 1, t, &psi, &mut ham, &mut potential_at);
        }
    }
    Ok(Trajectory {
        points,
        final_state: psi,
        steps,
        dt,
        max_norm_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigen::bound_states;
    use crate::spectral::grid::SpatialGrid;
    use crate::units::{CS133_MASS, HBAR};
    use core::f64::consts::PI;

    #[test]
    fn static_well_conserves_energy_and_state() {
        let a = 5.3e-6;
        let u0 = 1.380649e-27;
        let g = SpatialGrid::lattice(a, 1, 128).unwrap();
        let k = PI / a;
        let u: Vec<f64> = g.positions().map(|x| 0.5 * u0 * libm::cos(2.0 * k * x)).collect();
        let (_, ground) = bound_states(&g, CS133_MASS, &u, 1).unwrap().remove(0);
        let h = Hamiltonian::new(g, CS133_MASS, u.clone()).unwrap();
        let cfg = ChebyshevConfig::enclosing(HBAR / u0, -0.5 * u0, 0.5 * u0, h.kinetic_max());
        let traj = propagate_time_dependent(&ground, CS133_MASS, |_, out| out.copy_from_slice(&u), 2e-4, &cfg, 50, |_| {}).unwrap();
        let e0 = traj.points[0].energy;
        for p in &traj.points {
            assert!(libm::fabs(p.energy - e0) <= 1e-8 * libm::fabs(e0));
            assert!(libm::fabs(p.overlap - 1.0) < 1e-8);
        }
        assert!(traj.max_norm_drift < 1e-10);
        assert_eq!(traj.points.last().unwrap().time, 2e-4);
    }

    #[test]
    fn rejects_non_positive_duration() {
        let g = SpatialGrid::new(1e-6, 16).unwrap();
        let psi = Wavefunction::zeros(g);
        let cfg = ChebyshevConfig::enclosing(1e-7, 0.0, 1e-30, 1e-30);
        assert!(propagate_time_dependent(&psi, CS133_MASS, |_, _| {}, 0.0, &cfg, 1, |_| {}).is_err());
    }
}
