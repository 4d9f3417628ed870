//! Bound states by dense diagonalization of the Fourier-grid Hamiltonian.
//!
//! On a periodic grid the kinetic operator is a circulant matrix whose first
//! row is the inverse FFT of the kinetic energies; with the potential on the
//! diagonal the matrix is real symmetric.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::fft::Fft;
use super::grid::{SpatialGrid, Wavefunction};
use super::SpectralError;
use crate::units::HBAR;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 0; // nalgebra: 0 means no iteration limit

/// Lowest `n_states` eigenpairs, energies ascending.
pub fn bound_states(
    grid: &SpatialGrid,
    mass: f64,
    potential: &[f64],
    n_states: usize,
) -> Result<Vec<(f64, Wavefunction)>, SpectralError> {
    let n = grid.len();
    if potential.len() != n {
        return Err(SpectralError::GridMismatch {
            expected: n,
            got: potential.len(),
        });
    }
    if n_states == 0 || n_states > n / 2 {
        return Err(SpectralError::InvalidConfig("n_states must be between 1 and half the grid size"));
    }

    let mut row: Vec<Complex64> = (0..n)
        .map(|j| {
            let p = HBAR * grid.wavenumber(j);
            Complex64::new(p * p / (2.0 * mass), 0.0)
        })
        .collect();
    Fft::new(n).inverse(&mut row);
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let d = (i + n - j) % n;
        let t = row[d].re;
        if i == j {
            t + potential[i]
        } else {
            t
        }
    });

    let eig = SymmetricEigen::try_new(matrix, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(SpectralError::ConvergenceFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let inv_sqrt_dx = 1.0 / libm::sqrt(grid.dx());
    let mut states = Vec::with_capacity(n_states);
    for &idx in order.iter().take(n_states) {
        let col = eig.eigenvectors.column(idx);
        // Fix the overall sign so the largest component is positive.
        let big = col.iter().copied().fold(0.0f64, |m, v| if libm::fabs(v) > libm::fabs(m) { v } else { m });
        let sign = if big < 0.0 { -1.0 } else { 1.0 };
        let amps = col.iter().map(|&v| Complex64::new(sign * v * inv_sqrt_dx, 0.0)).collect();
        states.push((eig.eigenvalues[idx], Wavefunction::from_amplitudes(*grid, amps)?));
    }
    Ok(states)
}
