//! One-dimensional quantum dynamics on a periodic Fourier grid.
//!
//! The kinetic energy is applied in momentum space through an FFT and the
//! potential in position space. Time evolution uses a Chebyshev expansion of
//! the short-time propagator; bound states come from dense diagonalization
//! of the same grid Hamiltonian.

mod bessel;
mod chebyshev;
mod eigen;
mod fft;
mod grid;
mod hamiltonian;
mod propagate;

pub use bessel::bessel_j_all;
pub use chebyshev::{chebychev_step, ChebyshevConfig, ChebyshevPropagator, NORM_GROWTH_LIMIT};
pub use eigen::bound_states;
pub use fft::Fft;
pub use grid::{SpatialGrid, Wavefunction};
pub use hamiltonian::{apply_hamiltonian, Hamiltonian};
pub use propagate::{propagate_time_dependent, Sample, Trajectory, TrajectoryPoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("expected {expected} grid samples, got {got}")]
    GridMismatch { expected: usize, got: usize },
    #[error("invalid propagation settings: {0}")]
    InvalidConfig(&'static str),
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("norm grew by {growth:e} in one step; spectral bounds do not enclose the Hamiltonian")]
    SpectralBoundViolation { growth: f64 },
}
