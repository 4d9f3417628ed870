use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::SpectralError;

/// Uniform periodic grid `x_j = j L / N`, j = 0..N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    length: f64,
    points: usize,
}

impl SpatialGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(length: f64, points: usize) -> Result<Self, SpectralError> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(SpectralError::InvalidGrid("box length must be positive"));
        }
        if points < Self::MIN_POINTS || !points.is_power_of_two() {
            return Err(SpectralError::InvalidGrid("point count must be a power of two and at least 16"));
        }
        Ok(Self { length, points })
    }

    /// `periods` lattice periods of length `a`, `per_period` points each.
    pub fn lattice(a: f64, periods: usize, per_period: usize) -> Result<Self, SpectralError> {
        Self::new(a * periods as f64, periods * per_period)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|j| self.x(j))
    }

    /// Wavenumber of FFT bin `j`, in FFT order (non-negative first).
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.points as isize;
        let j = j as isize;
        let signed = if j < n / 2 { j } else { j - n };
        2.0 * PI * signed as f64 / self.length
    }

    /// Largest representable momentum divided by ħ, π N / L.
    pub fn k_max(&self) -> f64 {
        PI * self.points as f64 / self.length
    }

    /// Wraps `x - centre` into `[-L/2, L/2)`.
    pub fn offset(&self, x: f64, centre: f64) -> f64 {
        let l = self.length;
        let d = x - centre;
        d - l * libm::floor(d / l + 0.5)
    }
}

/// Complex amplitudes on a [`SpatialGrid`], normalized so Σ|ψ|² Δx = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: SpatialGrid,
    amps: Vec<Complex64>,
}

impl Wavefunction {
    pub fn zeros(grid: SpatialGrid) -> Self {
        Self {
            grid,
            amps: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_amplitudes(grid: SpatialGrid, amps: Vec<Complex64>) -> Result<Self, SpectralError> {
        if amps.len() != grid.len() {
            return Err(SpectralError::GridMismatch {
                expected: grid.len(),
                got: amps.len(),
            });
        }
        Ok(Self { grid, amps })
    }

    /// Samples `f` at the grid points; not normalized.
    pub fn from_fn(grid: SpatialGrid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let amps = grid.positions().map(&mut f).collect();
        Self { grid, amps }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Scales to unit norm; returns the norm before scaling.
    pub fn normalize(&mut self) -> f64 {
        let n = libm::sqrt(self.norm_sqr());
        if n > 0.0 {
            let s = 1.0 / n;
            for a in self.amps.iter_mut() {
                *a *= s;
            }
        }
        n
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Wavefunction) -> Complex64 {
        debug_assert_eq!(self.amps.len(), other.amps.len());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.dx()
    }

    /// Squared overlap `|<self|other>|²`.
    pub fn overlap(&self, other: &Wavefunction) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `<x>` with positions unwrapped around `centre`.
    pub fn mean_position(&self, centre: f64) -> f64 {
        let dx = self.grid.dx();
        let s: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm_sqr() * self.grid.offset(self.grid.x(j), centre))
            .sum();
        centre + s * dx / self.norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(SpatialGrid::new(1.0, 8).is_err());
        assert!(SpatialGrid::new(1.0, 48).is_err());
        assert!(SpatialGrid::new(0.0, 64).is_err());
        assert!(SpatialGrid::new(1.0, 64).is_ok());
    }

    #[test]
    fn momentum_cutoff() {
        let g = SpatialGrid::new(2.0, 64).unwrap();
        assert!((g.k_max() - PI * 32.0).abs() < 1e-12);
        assert!((g.wavenumber(1) - PI).abs() < 1e-12);
        assert!((g.wavenumber(63) + PI).abs() < 1e-12);
        assert!((g.wavenumber(32).abs() - g.k_max()).abs() < 1e-12);
    }

    #[test]
    fn normalization_and_overlap() {
        let g = SpatialGrid::new(4.0, 128).unwrap();
        let mut psi = Wavefunction::from_fn(g, |x| Complex64::new(libm::exp(-16.0 * (x - 2.0) * (x - 2.0)), 0.0));
        psi.normalize();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-14);
        assert!((psi.overlap(&psi) - 1.0).abs() < 1e-14);
        assert!((psi.mean_position(2.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn offset_wraps_to_nearest_image() {
        let g = SpatialGrid::new(10.0, 16).unwrap();
        assert!((g.offset(9.0, 1.0) + 2.0).abs() < 1e-12);
        assert!((g.offset(1.0, 9.0) - 2.0).abs() < 1e-12);
    }
}
