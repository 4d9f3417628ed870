//! Chebyshev expansion of the short-time propagator.
//!
//! With the spectrum mapped onto [-1, 1] by
//! `H' = 2 (H - E_min) / ΔE - 1`,
//!
//! ```text
//! exp(-i H Δt/ħ) = exp(-i (ΔE/2 + E_min) Δt/ħ) Σ_k b_k T_k(H'),
//! b_k = (2 - δ_k0) (-i)^k J_k(ΔE Δt / 2ħ),
//! ```
//!
//! and `T_k(H') ψ` follows from the three-term recursion. The coefficients
//! fall off faster than exponentially once k exceeds the argument of J_k.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::bessel::bessel_j_all;
use super::grid::Wavefunction;
use super::hamiltonian::Hamiltonian;
use super::SpectralError;
use crate::units::HBAR;

/// Growth of the squared norm over one step that signals a Hamiltonian
/// spectrum outside [e_min, e_max].
pub const NORM_GROWTH_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevConfig {
    pub dt: f64,
    pub e_min: f64,
    pub e_max: f64,
    /// Terms beyond the argument are dropped once |b_k| falls below this.
    pub tolerance: f64,
    pub max_order: usize,
}

impl ChebyshevConfig {
    /// Bounds `[u_min - m, u_max + t_max + m]` with a margin `m` of 5% of
    /// the raw span.
    pub fn enclosing(dt: f64, u_min: f64, u_max: f64, kinetic_max: f64) -> Self {
        let span = u_max + kinetic_max - u_min;
        let margin = 0.05 * span;
        Self {
            dt,
            e_min: u_min - margin,
            e_max: u_max + kinetic_max + margin,
            tolerance: 1e-15,
            max_order: 10_000,
        }
    }

    /// Argument of the Bessel functions, ΔE Δt / 2ħ.
    pub fn argument(&self) -> f64 {
        (self.e_max - self.e_min) * self.dt / (2.0 * HBAR)
    }

    fn validate(&self) -> Result<(), SpectralError> {
        if !(self.e_max > self.e_min) {
            return Err(SpectralError::InvalidConfig("e_max must exceed e_min"));
        }
        if !(self.tolerance > 0.0) {
            return Err(SpectralError::InvalidConfig("tolerance must be positive"));
        }
        if !(self.dt >= 0.0) {
            return Err(SpectralError::InvalidConfig("time step must be non-negative"));
        }
        Ok(())
    }
}

/// Coefficients for one fixed Δt and spectral window, reusable across steps.
#[derive(Debug, Clone)]
pub struct ChebyshevPropagator {
    config: ChebyshevConfig,
    coeffs: Vec<Complex64>,
    scale: f64,
    shift: f64,
    prev: Vec<Complex64>,
    cur: Vec<Complex64>,
    next: Vec<Complex64>,
}

impl ChebyshevPropagator {
    pub fn new(config: ChebyshevConfig, points: usize) -> Result<Self, SpectralError> {
        config.validate()?;
        let de = config.e_max - config.e_min;
        let r = config.argument();
        let kmax = (libm::ceil(r) as usize + 64).min(config.max_order + 1);
        let j = bessel_j_all(r, kmax);
        let phase = Complex64::from_polar(1.0, -(de / 2.0 + config.e_min) * config.dt / HBAR);
        let mut coeffs = Vec::new();
        let mut i_pow = Complex64::new(1.0, 0.0);
        for (k, &jk) in j.iter().enumerate() {
            let weight = if k == 0 { 1.0 } else { 2.0 };
            coeffs.push(phase * i_pow * (weight * jk));
            i_pow *= Complex64::new(0.0, -1.0);
            // The series ends with the first term past the argument that is
            // already below tolerance.
            if k as f64 > r && libm::fabs(weight * jk) < config.tolerance {
                break;
            }
        }
        if coeffs.len() > config.max_order || coeffs.len() == j.len() {
            return Err(SpectralError::InvalidConfig("expansion order exceeds max_order"));
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self {
            config,
            coeffs,
            scale: 2.0 / de,
            shift: -2.0 * config.e_min / de - 1.0,
            prev: vec![zero; points],
            cur: vec![zero; points],
            next: vec![zero; points],
        })
    }

    pub fn config(&self) -> &ChebyshevConfig {
        &self.config
    }

    /// Number of retained terms.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Last retained coefficient magnitude.
    pub fn last_coefficient(&self) -> f64 {
        self.coeffs.last().map_or(0.0, |c| c.norm())
    }

    /// Advances `psi` by Δt under `ham`, in place.
    pub fn step(&mut self, ham: &mut Hamiltonian, psi: &mut [Complex64]) -> Result<(), SpectralError> {
        let before: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        self.prev.copy_from_slice(psi);
        let b0 = self.coeffs[0];
        for v in psi.iter_mut() {
            *v *= b0;
        }
        if self.coeffs.len() > 1 {
            ham.apply_scaled(&self.prev, &mut self.cur, self.scale, self.shift);
            let b1 = self.coeffs[1];
            for (o, c) in psi.iter_mut().zip(&self.cur) {
                *o += b1 * c;
            }
        }
        for k in 2..self.coeffs.len() {
            ham.apply_scaled(&self.cur, &mut self.next, 2.0 * self.scale, 2.0 * self.shift);
            let bk = self.coeffs[k];
            for ((n, p), o) in self.next.iter_mut().zip(&self.prev).zip(psi.iter_mut()) {
                *n -= p;
                *o += bk * *n;
            }
            core::mem::swap(&mut self.prev, &mut self.cur);
            core::mem::swap(&mut self.cur, &mut self.next);
        }
        let after: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if after > before * (1.0 + NORM_GROWTH_LIMIT) {
            return Err(SpectralError::SpectralBoundViolation { growth: after / before - 1.0 });
        }
        Ok(())
    }
}

/// One propagation step of `psi` under a fixed Hamiltonian.
pub fn chebychev_step(psi: &Wavefunction, ham: &mut Hamiltonian, config: &ChebyshevConfig) -> Result<Wavefunction, SpectralError> {
    if ham.grid().len() != psi.grid().len() {
        return Err(SpectralError::GridMismatch {
            expected: ham.grid().len(),
            got: psi.grid().len(),
        });
    }
    let mut prop = ChebyshevPropagator::new(*config, psi.grid().len())?;
    let mut out = psi.clone();
    prop.step(ham, out.amplitudes_mut())?;
    Ok(out)
}
