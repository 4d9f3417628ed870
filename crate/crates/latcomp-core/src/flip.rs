//! Site-selective flips between the storage and mobile sublevels.
//!
//! Frequencies and couplings are angular frequencies (rad/s) with ħ = 1:
//! an energy E enters as E/ħ. In the rotating frame of the two fields the
//! Λ-system Hamiltonian in the basis {|0⟩, |1⟩, |2⟩} is
//!
//! ```text
//!     | 0      W01*        0         |
//! H = | W01    Δ01         W12*      |
//!     | 0      W12         Δ01 + Δ12 |
//! ```
//!
//! so Raman resonance is `Δ01 + Δ12 = 0`. Eliminating |1⟩ to second order
//! gives the effective coupling `W02 = (W01 W12 / 2)(1/Δ12 - 1/Δ01)` and
//! Stark shifts `-|W01|²/Δ01` on |0⟩ and `+|W12|²/Δ12` on |2⟩.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Motional heating per 30 µs flip, in vibrational quanta. Flips are not
/// simulated at the motional level; this figure only feeds heating budgets.
pub const FLIP_HEATING_QUANTA: f64 = 1e-4;

/// Local error tolerance of the adaptive integrator.
pub const INTEGRATOR_TOLERANCE: f64 = 1e-8;

const MAX_STEPS: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlipError {
    #[error("detuning must be nonzero for the effective two-level reduction")]
    ZeroDetuning,
    #[error("integration failed: {0}")]
    IntegrationFailure(&'static str),
    #[error("invalid flip parameters: {0}")]
    Invalid(&'static str),
}

/// Three levels in a Λ configuration, |0⟩ and |2⟩ coupled through |1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSystem {
    pub w01: Complex64,
    pub w12: Complex64,
    pub delta01: f64,
    pub delta12: f64,
}

impl LambdaSystem {
    pub fn new(w01: Complex64, w12: Complex64, delta01: f64, delta12: f64) -> Self {
        Self { w01, w12, delta01, delta12 }
    }

    /// Real couplings tuned to Raman resonance, `Δ12 = -Δ01`.
    pub fn raman_resonant(w01: f64, w12: f64, delta: f64) -> Self {
        Self::new(Complex64::new(w01, 0.0), Complex64::new(w12, 0.0), delta, -delta)
    }

    /// Largest |W| / |Δ|; the reduction holds while this is small.
    pub fn validity_ratio(&self) -> f64 {
        let a = self.w01.norm() / libm::fabs(self.delta01);
        let b = self.w12.norm() / libm::fabs(self.delta12);
        a.max(b)
    }

    /// Rotating-frame Hamiltonian, rows and columns in order 0, 1, 2.
    pub fn hamiltonian(&self) -> [[Complex64; 3]; 3] {
        let z = Complex64::new(0.0, 0.0);
        let r = |x: f64| Complex64::new(x, 0.0);
        [
            [z, self.w01.conj(), z],
            [self.w01, r(self.delta01), self.w12.conj()],
            [z, self.w12, r(self.delta01 + self.delta12)],
        ]
    }
}

/// |0⟩ and |2⟩ after eliminating the intermediate level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTwoLevel {
    pub w02: Complex64,
    /// Shift of |0⟩, `-|W01|²/Δ01`.
    pub stark0: f64,
    /// Shift of |2⟩, `|W12|²/Δ12`.
    pub stark2: f64,
    /// Energy of |2⟩ minus energy of |0⟩, bare detuning plus Stark shifts.
    pub detuning: f64,
}

impl EffectiveTwoLevel {
    /// Rotating-frame Hamiltonian in the basis {|0⟩, |2⟩}.
    pub fn hamiltonian(&self, bare: f64) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.stark0, 0.0), self.w02.conj()],
            [self.w02, Complex64::new(bare + self.stark2, 0.0)],
        ]
    }

    /// Peak Rabi frequency `2|W02|`.
    pub fn rabi_frequency(&self) -> f64 {
        2.0 * self.w02.norm()
    }
}

pub fn effective_hamiltonian(system: &LambdaSystem) -> Result<EffectiveTwoLevel, FlipError> {
    if system.delta01 == 0.0 || system.delta12 == 0.0 {
        return Err(FlipError::ZeroDetuning);
    }
    let w02 = system.w01 * system.w12 * 0.5 * (1.0 / system.delta12 - 1.0 / system.delta01);
    let stark0 = -system.w01.norm_sqr() / system.delta01;
    let stark2 = system.w12.norm_sqr() / system.delta12;
    Ok(EffectiveTwoLevel {
        w02,
        stark0,
        stark2,
        detuning: system.delta01 + system.delta12 + stark2 - stark0,
    })
}

type C = Complex64;

/// exp(-i K) for Hermitian 2×2 K.
fn expm_2(k: &[[C; 2]; 2]) -> [[C; 2]; 2] {
    let k0 = 0.5 * (k[0][0].re + k[1][1].re);
    let z = 0.5 * (k[0][0].re - k[1][1].re);
    let off = k[1][0];
    let n = libm::sqrt(z * z + off.norm_sqr());
    let phase = C::from_polar(1.0, -k0);
    let (c, s) = (libm::cos(n), if n > 0.0 { libm::sin(n) / n } else { 1.0 });
    let i = C::new(0.0, 1.0);
    [
        [phase * (c - i * s * z), phase * (-i * s * off.conj())],
        [phase * (-i * s * off), phase * (c + i * s * z)],
    ]
}

/// exp(-i K) for Hermitian N×N K through its eigendecomposition.
fn expm_dense<const N: usize>(k: &[[C; N]; N]) -> Result<[[C; N]; N], FlipError> {
    let m = DMatrix::from_fn(N, N, |i, j| k[i][j]);
    let eig = SymmetricEigen::try_new(m, 1e-15, 0).ok_or(FlipError::IntegrationFailure("eigendecomposition did not converge"))?;
    let v = &eig.eigenvectors;
    let mut out = [[C::new(0.0, 0.0); N]; N];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut acc = C::new(0.0, 0.0);
            for l in 0..N {
                acc += v[(i, l)] * C::from_polar(1.0, -eig.eigenvalues[l]) * v[(j, l)].conj();
            }
            *cell = acc;
        }
    }
    Ok(out)
}

fn expm<const N: usize>(k: &[[C; N]; N]) -> Result<[[C; N]; N], FlipError> {
    if N == 2 {
        let k2 = [[k[0][0], k[0][1]], [k[1][0], k[1][1]]];
        let e = expm_2(&k2);
        let mut out = [[C::new(0.0, 0.0); N]; N];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = e[i][j];
            }
        }
        Ok(out)
    } else {
        expm_dense(k)
    }
}

fn mat_vec<const N: usize>(m: &[[C; N]; N], v: &[C; N]) -> [C; N] {
    let mut out = [C::new(0.0, 0.0); N];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// One fourth-order Magnus step over `[t, t + h]` (two Gauss points).
fn magnus_step<const N: usize, H>(h_of: &mut H, t: f64, h: f64, psi: &[C; N]) -> Result<[C; N], FlipError>
where
    H: FnMut(f64) -> [[C; N]; N],
{
    const S3: f64 = 0.288_675_134_594_812_9; // √3 / 6
    let a1 = h_of(t + (0.5 - S3) * h);
    let a2 = h_of(t + (0.5 + S3) * h);
    // K = h/2 (A1 + A2) + i (√3 h² / 12) [A1, A2]
    let c = C::new(0.0, libm::sqrt(3.0) * h * h / 12.0);
    let mut k = [[C::new(0.0, 0.0); N]; N];
    for i in 0..N {
        for j in 0..N {
            let mut comm = C::new(0.0, 0.0);
            for l in 0..N {
                comm += a1[i][l] * a2[l][j] - a2[i][l] * a1[l][j];
            }
            k[i][j] = 0.5 * h * (a1[i][j] + a2[i][j]) + c * comm;
        }
    }
    Ok(mat_vec(&expm(&k)?, psi))
}

/// Integrates `i dψ/dt = H(t) ψ` from `t0` to `t1` with step doubling on a
/// fourth-order Magnus scheme. Every step is an exact unitary, so the norm
/// is preserved to rounding. `initial_step` of zero picks `(t1 - t0) / 64`.
pub fn integrate<const N: usize, H>(mut h_of: H, psi0: [C; N], t0: f64, t1: f64, initial_step: f64) -> Result<[C; N], FlipError>
where
    H: FnMut(f64) -> [[C; N]; N],
{
    if !(t1 > t0) {
        return Err(FlipError::Invalid("integration interval must be positive"));
    }
    let mut psi = psi0;
    let mut t = t0;
    let mut h = if initial_step > 0.0 { initial_step } else { (t1 - t0) / 64.0 };
    let mut steps = 0usize;
    while t < t1 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(FlipError::IntegrationFailure("step budget exhausted"));
        }
        let last = t + h >= t1;
        let hh = if last { t1 - t } else { h };
        let big = magnus_step(&mut h_of, t, hh, &psi)?;
        let half = magnus_step(&mut h_of, t, hh / 2.0, &psi)?;
        let fine = magnus_step(&mut h_of, t + hh / 2.0, hh / 2.0, &half)?;
        let err = libm::sqrt(big.iter().zip(&fine).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>());
        if !err.is_finite() {
            return Err(FlipError::IntegrationFailure("non-finite state"));
        }
        if err <= INTEGRATOR_TOLERANCE {
            psi = fine;
            t = if last { t1 } else { t + hh };
        }
        let grow = if err > 0.0 { 0.9 * libm::pow(INTEGRATOR_TOLERANCE / err, 0.2) } else { 4.0 };
        h = hh * grow.clamp(0.2, 4.0);
        if h < 1e-14 * (t1 - t0) {
            return Err(FlipError::IntegrationFailure("step size underflow"));
        }
    }
    Ok(psi)
}

/// Envelope of a π-pulse-style drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Square,
    /// `0.42 - 0.5 cos(2πs) + 0.08 cos(4πs)` over `s ∈ [0, 1]`.
    Blackman,
}

impl PulseShape {
    pub fn envelope(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        match self {
            PulseShape::Square => 1.0,
            PulseShape::Blackman => 0.42 - 0.5 * libm::cos(2.0 * PI * s) + 0.08 * libm::cos(4.0 * PI * s),
        }
    }

    /// Mean of the envelope over the pulse.
    pub fn mean(&self) -> f64 {
        match self {
            PulseShape::Square => 1.0,
            PulseShape::Blackman => 0.42,
        }
    }
}

/// A shaped resonant drive of given area and duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub shape: PulseShape,
    /// Pulse area ∫Ω dt, rad.
    pub area: f64,
    /// s.
    pub duration: f64,
}

impl Pulse {
    pub fn new(shape: PulseShape, area: f64, duration: f64) -> Result<Self, FlipError> {
        if !(area > 0.0) || !(duration > 0.0) || !duration.is_finite() {
            return Err(FlipError::Invalid("pulse area and duration must be positive and finite"));
        }
        Ok(Self { shape, area, duration })
    }

    /// Duration fixed by the peak Rabi frequency of an effective system.
    pub fn from_system(two: &EffectiveTwoLevel, shape: PulseShape, area: f64) -> Result<Self, FlipError> {
        let rabi = two.rabi_frequency();
        if !(rabi > 0.0) {
            return Err(FlipError::Invalid("effective coupling is zero"));
        }
        Self::new(shape, area, area / (rabi * shape.mean()))
    }

    pub fn peak_rabi(&self) -> f64 {
        self.area / (self.duration * self.shape.mean())
    }

    pub fn rabi(&self, t: f64) -> f64 {
        self.peak_rabi() * self.shape.envelope(t / self.duration)
    }

    /// Angular frequency unit matching the pulse length, 2π / T.
    pub fn bandwidth(&self) -> f64 {
        2.0 * PI / self.duration
    }
}

fn two_level(rabi: f64, detuning: f64) -> [[C; 2]; 2] {
    [
        [C::new(-detuning / 2.0, 0.0), C::new(rabi / 2.0, 0.0)],
        [C::new(rabi / 2.0, 0.0), C::new(detuning / 2.0, 0.0)],
    ]
}

/// Final upper-state population after driving a two-level atom, starting in
/// the lower state, with `pulse` at `detuning` (rad/s).
pub fn simulate_pi_pulse(pulse: &Pulse, detuning: f64) -> Result<f64, FlipError> {
    let psi0 = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let h0 = pulse.duration / 256.0;
    let psi = integrate(|t| two_level(pulse.rabi(t), detuning), psi0, 0.0, pulse.duration, h0)?;
    Ok(psi[1].norm_sqr())
}

/// Closed-form square-pulse transfer, `Ω²/(Ω²+Δ²) sin²(√(Ω²+Δ²) T / 2)`.
pub fn rabi_formula(rabi: f64, detuning: f64, duration: f64) -> f64 {
    let g2 = rabi * rabi + detuning * detuning;
    if g2 == 0.0 {
        return 0.0;
    }
    let s = libm::sin(libm::sqrt(g2) * duration / 2.0);
    rabi * rabi / g2 * s * s
}

/// Linear sweep of the two-level detuning through resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chirp {
    /// Off-diagonal coupling W, rad/s (Rabi frequency 2W).
    pub coupling: f64,
    /// dΔ/dt, rad/s².
    pub rate: f64,
    /// Total detuning range swept, rad/s, centred on resonance.
    pub span: f64,
}

impl Chirp {
    /// `W² / |dΔ/dt|`; transfer tends to one as this grows.
    pub fn adiabaticity(&self) -> f64 {
        self.coupling * self.coupling / libm::fabs(self.rate)
    }

    pub fn duration(&self) -> f64 {
        self.span / libm::fabs(self.rate)
    }
}

/// Landau–Zener transfer `1 - exp(-2π W² / |dΔ/dt|)`.
pub fn landau_zener(chirp: &Chirp) -> f64 {
    1.0 - libm::exp(-2.0 * PI * chirp.adiabaticity())
}

/// Lower-energy eigenvector of a real symmetric 2×2 `[[-d/2, w], [w, d/2]]`.
fn lower_adiabatic(detuning: f64, w: f64) -> [C; 2] {
    let theta = 0.5 * libm::atan2(2.0 * w, detuning);
    // Eigenvalue -√(d²/4 + w²): (cos θ, -sin θ).
    [C::new(libm::cos(theta), 0.0), C::new(-libm::sin(theta), 0.0)]
}

/// Population transferred by a linear chirp, `H = [[-Δ(t)/2, W], [W, Δ(t)/2]]`
/// with Δ swept over `[-span/2, span/2]` (or reversed for a negative rate).
///
/// The atom starts in the dressed state that coincides with |0⟩ far from
/// resonance, and transfer is the population left in that dressed state at
/// the end, which has become |1⟩. Starting dressed removes the ringing from
/// switching the coupling on at finite detuning.
pub fn simulate_chirped_passage(chirp: &Chirp) -> Result<f64, FlipError> {
    if !(chirp.span > 0.0) || chirp.rate == 0.0 {
        return Err(FlipError::Invalid("chirp needs a positive span and a nonzero rate"));
    }
    if chirp.coupling == 0.0 {
        return Ok(0.0);
    }
    let t_end = chirp.duration() / 2.0;
    let detuning = |t: f64| chirp.rate * t;
    let w = chirp.coupling;
    // For a rising sweep |0⟩ (energy -Δ/2) starts as the upper dressed state.
    let start_lower = lower_adiabatic(detuning(-t_end), w);
    let start = if chirp.rate > 0.0 { [-start_lower[1].conj(), start_lower[0].conj()] } else { start_lower };
    let h0 = 0.1 / libm::sqrt(w * w + chirp.span * chirp.span / 4.0);
    let psi = integrate(|t| two_level(2.0 * w, detuning(t)), start, -t_end, t_end, h0)?;
    let end_lower = lower_adiabatic(detuning(t_end), w);
    let end = if chirp.rate > 0.0 { [-end_lower[1].conj(), end_lower[0].conj()] } else { end_lower };
    let follow: C = end.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
    Ok(follow.norm_sqr())
}

/// Which field of the Λ system is chirped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChirpLeg {
    /// The 0 → 1 field.
    Lower,
    /// The 2 → 1 field.
    Upper,
}

/// Three-level adiabatic passage: one field is swept linearly so the
/// two-photon detuning runs from `-span/2` to `+span/2` around the
/// Stark-shifted Raman resonance. Returns populations of |0⟩, |1⟩, |2⟩.
pub fn simulate_chirped_lambda(system: &LambdaSystem, leg: ChirpLeg, rate: f64, span: f64) -> Result<[f64; 3], FlipError> {
    let eff = effective_hamiltonian(system)?;
    if !(span > 0.0) || rate == 0.0 {
        return Err(FlipError::Invalid("chirp needs a positive span and a nonzero rate"));
    }
    let t_end = span / libm::fabs(rate) / 2.0;
    // Offset of the swept detuning that puts the dressed crossing at t = 0.
    let centre = -eff.detuning;
    let hamiltonian = |t: f64| {
        let mut s = *system;
        match leg {
            ChirpLeg::Lower => s.delta01 += centre + rate * t,
            ChirpLeg::Upper => s.delta12 += centre + rate * t,
        }
        s.hamiltonian()
    };
    let z = C::new(0.0, 0.0);
    let psi0 = [C::new(1.0, 0.0), z, z];
    let h0 = 0.05 / libm::fabs(system.delta01).max(libm::fabs(system.delta12));
    let psi = integrate(hamiltonian, psi0, -t_end, t_end, h0)?;
    Ok([psi[0].norm_sqr(), psi[1].norm_sqr(), psi[2].norm_sqr()])
}

/// Final populations of the full three-level system and of the effective
/// two-level model after holding constant couplings for `duration`,
/// starting in |0⟩: `([P0, P1, P2], [P0, P2])`.
pub fn compare_three_level(system: &LambdaSystem, duration: f64) -> Result<([f64; 3], [f64; 2]), FlipError> {
    let eff = effective_hamiltonian(system)?;
    let z = C::new(0.0, 0.0);
    let h_full = system.hamiltonian();
    let full = integrate(|_| h_full, [C::new(1.0, 0.0), z, z], 0.0, duration, 0.0)?;
    let h_eff = eff.hamiltonian(system.delta01 + system.delta12);
    let two = integrate(|_| h_eff, [C::new(1.0, 0.0), z], 0.0, duration, 0.0)?;
    Ok(([full[0].norm_sqr(), full[1].norm_sqr(), full[2].norm_sqr()], [two[0].norm_sqr(), two[1].norm_sqr()]))
}

/// Tightly focused beam that Stark-shifts the target atom's transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AddressingBeam {
    /// W.
    pub power: f64,
    /// m.
    pub wavelength: f64,
    /// Waist radius w0, m.
    pub waist: f64,
    /// Tuned to the frequency where the storage sublevel has no Stark
    /// shift; the shift then acts on the mobile sublevel only.
    pub magic: bool,
}

impl AddressingBeam {
    pub const DEFAULT_WAVELENGTH: f64 = 877e-9;

    pub fn new(power: f64, waist: f64) -> Result<Self, FlipError> {
        if !(waist > 0.0) {
            return Err(FlipError::Invalid("beam waist must be positive"));
        }
        Ok(Self {
            power,
            wavelength: Self::DEFAULT_WAVELENGTH,
            waist,
            magic: true,
        })
    }

    /// z_R = π w0² / λ.
    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    /// Peak intensity 2P / (π w0²), W/m².
    pub fn peak_intensity(&self) -> f64 {
        2.0 * self.power / (PI * self.waist * self.waist)
    }

    /// Intensity relative to the focus at radius `r` and axial offset `z`.
    pub fn relative_intensity(&self, r: f64, z: f64) -> f64 {
        let q = 1.0 + (z / self.rayleigh_range()) * (z / self.rayleigh_range());
        libm::exp(-2.0 * r * r / (self.waist * self.waist * q)) / q
    }

    /// Stark shift of the storage sublevel relative to that of the mobile
    /// one: zero at the magic frequency.
    pub fn storage_shift_fraction(&self) -> f64 {
        if self.magic {
            0.0
        } else {
            1.0
        }
    }
}

/// On-axis intensity at the target over that at the nearest neighbour one
/// lattice spacing along the beam, `1 + (a / z_R)²`.
pub fn addressing_selectivity(beam: &AddressingBeam, spacing: f64) -> Result<f64, FlipError> {
    if !(spacing > 0.0) {
        return Err(FlipError::Invalid("lattice spacing must be positive"));
    }
    let q = spacing / beam.rayleigh_range();
    Ok(1.0 + q * q)
}

/// Ceiling on off-target excitation, `Ω²/(Ω² + Δ²)` with Ω = π / T (a π
/// pulse of length T) and Δ = 2π × `shift_difference` (Hz).
pub fn frequency_selectivity(pulse_duration: f64, shift_difference: f64) -> Result<f64, FlipError> {
    if !(pulse_duration > 0.0) || !(shift_difference > 0.0) {
        return Err(FlipError::Invalid("pulse duration and shift difference must be positive"));
    }
    let rabi = PI / pulse_duration;
    let d = 2.0 * PI * shift_difference;
    Ok(rabi * rabi / (rabi * rabi + d * d))
}

/// Transfer over a grid of chirps, in input order.
pub fn chirp_scan(chirps: &[Chirp]) -> Result<Vec<(f64, f64)>, FlipError> {
    let mut out = Vec::with_capacity(chirps.len());
    for c in chirps {
        out.push((simulate_chirped_passage(c)?, landau_zener(c)));
    }
    Ok(out)
}

/// Upper-state population sampled `samples + 1` times over a pulse;
/// used to check unitarity along the way.
pub fn pulse_populations(pulse: &Pulse, detuning: f64, samples: usize) -> Result<Vec<[f64; 2]>, FlipError> {
    let n = samples.max(1);
    let mut psi = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let mut out = vec![[1.0, 0.0]];
    let dt = pulse.duration / n as f64;
    for i in 0..n {
        let t0 = i as f64 * dt;
        psi = integrate(|t| two_level(pulse.rabi(t), detuning), psi, t0, t0 + dt, dt / 16.0)?;
        out.push([psi[0].norm_sqr(), psi[1].norm_sqr()]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_detunings_cancel_coupling() {
        let s = LambdaSystem::new(C::new(3.0, 1.0), C::new(2.0, -0.5), 7.0, 7.0);
        assert_eq!(effective_hamiltonian(&s).unwrap().w02, C::new(0.0, 0.0));
    }

    #[test]
    fn raman_resonance_coupling() {
        let (w, d) = (2.0, 50.0);
        let e = effective_hamiltonian(&LambdaSystem::raman_resonant(w, w, -d)).unwrap();
        assert!((e.w02 - C::new(w * w / d, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn coupling_is_bilinear() {
        let s = LambdaSystem::new(C::new(1.0, 0.3), C::new(0.7, 0.0), 20.0, -35.0);
        let k = 3.0;
        let scaled = LambdaSystem { w01: s.w01 * k, w12: s.w12 * k, ..s };
        let (a, b) = (effective_hamiltonian(&s).unwrap(), effective_hamiltonian(&scaled).unwrap());
        assert!((b.w02 - a.w02 * k * k).norm() < 1e-14);
    }

    #[test]
    fn swapping_legs_flips_sign() {
        let s = LambdaSystem::new(C::new(1.3, 0.0), C::new(0.4, 0.0), 20.0, -35.0);
        let t = LambdaSystem::new(s.w12, s.w01, s.delta12, s.delta01);
        let (a, b) = (effective_hamiltonian(&s).unwrap(), effective_hamiltonian(&t).unwrap());
        assert!((a.w02 + b.w02).norm() < 1e-15);
    }

    #[test]
    fn zero_detuning_rejected() {
        let s = LambdaSystem::new(C::new(1.0, 0.0), C::new(1.0, 0.0), 0.0, 1.0);
        assert_eq!(effective_hamiltonian(&s), Err(FlipError::ZeroDetuning));
    }

    #[test]
    fn expm_2_matches_dense() {
        let k = [[C::new(0.3, 0.0), C::new(1.1, -0.4)], [C::new(1.1, 0.4), C::new(-2.0, 0.0)]];
        let a = expm_2(&k);
        let b = expm_dense(&k).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn resonant_square_pulses() {
        let pi = Pulse::new(PulseShape::Square, PI, 30e-6).unwrap();
        assert!((simulate_pi_pulse(&pi, 0.0).unwrap() - 1.0).abs() < 1e-6);
        let two_pi = Pulse::new(PulseShape::Square, 2.0 * PI, 30e-6).unwrap();
        assert!(simulate_pi_pulse(&two_pi, 0.0).unwrap() < 1e-6);
        let b = Pulse::new(PulseShape::Blackman, PI, 30e-6).unwrap();
        assert!((simulate_pi_pulse(&b, 0.0).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn detuned_square_matches_rabi_formula() {
        let p = Pulse::new(PulseShape::Square, PI, 30e-6).unwrap();
        for d in [0.3, 1.0, 2.7, 6.0] {
            let delta = d * p.peak_rabi();
            let expected = rabi_formula(p.peak_rabi(), delta, p.duration);
            assert!((simulate_pi_pulse(&p, delta).unwrap() - expected).abs() < 1e-6, "d = {d}");
        }
    }

    #[test]
    fn blackman_suppresses_far_detuned_excitation() {
        let sq = Pulse::new(PulseShape::Square, PI, 30e-6).unwrap();
        let bl = Pulse::new(PulseShape::Blackman, PI, 30e-6).unwrap();
        for m in [3.0, 4.5, 6.0] {
            let d = m * sq.bandwidth();
            assert!(simulate_pi_pulse(&bl, d).unwrap() < simulate_pi_pulse(&sq, d).unwrap(), "{m}x bandwidth");
        }
    }

    #[test]
    fn pulse_stays_normalized() {
        let p = Pulse::new(PulseShape::Blackman, PI, 30e-6).unwrap();
        for pops in pulse_populations(&p, 0.4 * p.peak_rabi(), 40).unwrap() {
            assert!((pops[0] + pops[1] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn chirp_limits() {
        let w = 1e5;
        let slow = Chirp {
            coupling: w,
            rate: w * w / 2.0,
            span: 100.0 * w,
        };
        assert!((simulate_chirped_passage(&slow).unwrap() - 1.0).abs() < 1e-3);
        let off = Chirp { coupling: 0.0, ..slow };
        assert_eq!(simulate_chirped_passage(&off).unwrap(), 0.0);
    }

    #[test]
    fn chirp_matches_landau_zener() {
        let w = 1e5;
        for g in [0.03, 0.1, 0.25] {
            for sign in [1.0, -1.0] {
                let c = Chirp {
                    coupling: w,
                    rate: sign * w * w / g,
                    span: 100.0 * w,
                };
                let p = simulate_chirped_passage(&c).unwrap();
                assert!((p - landau_zener(&c)).abs() < 1e-3, "g = {g}: {p} vs {}", landau_zener(&c));
            }
        }
    }

    #[test]
    fn three_level_reduction_error_is_second_order() {
        let d = 1e7;
        let mut errs = Vec::new();
        for eps in [0.1, 0.05] {
            let s = LambdaSystem::raman_resonant(eps * d, eps * d, d);
            let eff = effective_hamiltonian(&s).unwrap();
            let t = PI / (2.0 * eff.w02.norm());
            let (full, two) = compare_three_level(&s, t).unwrap();
            assert!((full.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            let err = (full[2] - two[1]).abs().max((full[0] - two[0]).abs());
            assert!(err < 2.0 * eps * eps, "eps {eps}: {err}");
            errs.push(err);
        }
        // Halving ε cuts the error at least fourfold, up to rounding.
        let ratio = errs[0] / errs[1];
        assert!(ratio > 3.5, "ratio {ratio}");
    }

    #[test]
    fn lambda_chirp_transfers_on_either_leg() {
        let d = 1e7;
        let eps = 0.03;
        let s = LambdaSystem::raman_resonant(eps * d, eps * d, d);
        let w = effective_hamiltonian(&s).unwrap().w02.norm();
        for leg in [ChirpLeg::Lower, ChirpLeg::Upper] {
            let p = simulate_chirped_lambda(&s, leg, w * w / 2.0, 200.0 * w).unwrap();
            // Switching on at full coupling leaves |1⟩ ringing at up to 4(W/Δ)².
            assert!(p[0] < 1e-3, "{leg:?}: {p:?}");
            assert!(p[1] < 4.5 * eps * eps, "{leg:?}: {p:?}");
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn selectivity_formulas() {
        let beam = AddressingBeam::new(2e-6, 1.2e-6).unwrap();
        let zr = beam.rayleigh_range();
        assert!((addressing_selectivity(&beam, zr).unwrap() - 2.0).abs() < 1e-12);
        let r = addressing_selectivity(&beam, 5e-6).unwrap();
        assert!((r - 1.94).abs() < 0.01, "{r}");
        assert!(addressing_selectivity(&beam, 1.0).unwrap() > 1e10);
        assert!((beam.relative_intensity(0.0, zr) - 0.5).abs() < 1e-12);

        let t = 30e-6;
        let rabi = PI / t;
        let at_rabi = frequency_selectivity(t, rabi / (2.0 * PI)).unwrap();
        assert!((at_rabi - 0.5).abs() < 1e-12);
        let b = frequency_selectivity(t, 600e3).unwrap();
        let d = 2.0 * PI * 600e3;
        assert!((b - rabi * rabi / (rabi * rabi + d * d)).abs() < 1e-18);
        assert!(frequency_selectivity(t, 1e15).unwrap() < 1e-18);
    }
}
