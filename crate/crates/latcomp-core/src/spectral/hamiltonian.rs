use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::fft::Fft;
use super::grid::{SpatialGrid, Wavefunction};
use super::SpectralError;
use crate::units::HBAR;

/// Fourier-grid Hamiltonian `p²/2m + U(x)`: kinetic energy is diagonal in
/// momentum space, the potential in position space.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    grid: SpatialGrid,
    mass: f64,
    fft: Fft,
    kinetic: Vec<f64>,
    potential: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl Hamiltonian {
    pub fn new(grid: SpatialGrid, mass: f64, potential: Vec<f64>) -> Result<Self, SpectralError> {
        if potential.len() != grid.len() {
            return Err(SpectralError::GridMismatch {
                expected: grid.len(),
                got: potential.len(),
            });
        }
        let kinetic = (0..grid.len())
            .map(|j| {
                let p = HBAR * grid.wavenumber(j);
                p * p / (2.0 * mass)
            })
            .collect();
        Ok(Self {
            grid,
            mass,
            fft: Fft::new(grid.len()),
            kinetic,
            potential,
            scratch: vec![Complex64::new(0.0, 0.0); grid.len()],
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Mutable potential samples, for time-dependent problems.
    pub fn potential_mut(&mut self) -> &mut [f64] {
        &mut self.potential
    }

    /// Kinetic energy of FFT bin `j`.
    pub fn kinetic(&self) -> &[f64] {
        &self.kinetic
    }

    /// Largest kinetic energy on the grid, (ħ k_max)² / 2m.
    pub fn kinetic_max(&self) -> f64 {
        let p = HBAR * self.grid.k_max();
        p * p / (2.0 * self.mass)
    }

    /// `out = (scale H + shift) psi`; used both for plain application and
    /// for the rescaled Chebyshev operator.
    pub fn apply_scaled(&mut self, psi: &[Complex64], out: &mut [Complex64], scale: f64, shift: f64) {
        self.scratch.copy_from_slice(psi);
        self.fft.forward(&mut self.scratch);
        for (v, t) in self.scratch.iter_mut().zip(&self.kinetic) {
            *v *= *t;
        }
        self.fft.inverse(&mut self.scratch);
        for j in 0..psi.len() {
            out[j] = (self.scratch[j] + psi[j] * self.potential[j]) * scale + psi[j] * shift;
        }
    }

    pub fn apply(&mut self, psi: &[Complex64], out: &mut [Complex64]) {
        self.apply_scaled(psi, out, 1.0, 0.0);
    }

    /// `<psi|H|psi> / <psi|psi>`.
    pub fn expectation(&mut self, psi: &Wavefunction) -> f64 {
        let amps = psi.amplitudes();
        let mut h = vec![Complex64::new(0.0, 0.0); amps.len()];
        self.apply(amps, &mut h);
        let num: Complex64 = amps.iter().zip(&h).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        num.re / den
    }
}

/// `(T + U) psi` for potential samples on the wavefunction's grid.
pub fn apply_hamiltonian(psi: &Wavefunction, potential: &[f64], mass: f64) -> Result<Wavefunction, SpectralError> {
    let mut h = Hamiltonian::new(*psi.grid(), mass, potential.to_vec())?;
    let mut out = vec![Complex64::new(0.0, 0.0); psi.grid().len()];
    h.apply(psi.amplitudes(), &mut out);
    Wavefunction::from_amplitudes(*psi.grid(), out)
}
