//! State-dependent optical lattice along one axis.
//!
//! Two counter-propagating beams with relative polarization angle θ give
//!
//! ```text
//! U(z) = U0/2 cos θ cos 2kz + s U1/2 sin θ sin 2kz,   k = π/a,
//! ```
//!
//! where `s = ±1` follows the sign of m_F. At fixed θ this is a single
//! cosine `R cos(2kz - φ)` with `R = ½ sqrt(U0² cos²θ + U1² sin²θ)` and
//! `tan φ = s U1 sin θ / (U0 cos θ)`, so each well has depth `2R` and its
//! minimum sits at `z = (π + φ) / 2k`. Rotating θ by π drags the minimum
//! by half a lattice constant, in the direction set by `s`.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::units::{microkelvin_to_joule, micrometre, CS133_HYPERFINE_HZ, CS133_MASS};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("well depth vanishes at theta = {theta}")]
    DegenerateDepth { theta: f64 },
    #[error("invalid lattice parameters: {0}")]
    Invalid(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpecies {
    /// kg
    pub mass: f64,
    pub f: u32,
    pub m_f: i32,
    /// Ground-state hyperfine splitting, Hz. Informational.
    pub hyperfine_hz: f64,
}

impl AtomSpecies {
    /// Caesium-133 in F = 4, m_F = 1.
    pub const fn cesium() -> Self {
        Self {
            mass: CS133_MASS,
            f: 4,
            m_f: 1,
            hyperfine_hz: CS133_HYPERFINE_HZ,
        }
    }

    /// U0 / U1 implied by the hyperfine state, 2F / |m_F|.
    pub fn depth_ratio(&self) -> f64 {
        2.0 * self.f as f64 / self.m_f.unsigned_abs() as f64
    }
}

impl Default for AtomSpecies {
    fn default() -> Self {
        Self::cesium()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    /// Depth of the polarization-independent term, J.
    pub u0: f64,
    /// Depth of the state-dependent term, J.
    pub u1: f64,
    /// Lattice constant, m.
    pub a: f64,
    pub atom: AtomSpecies,
}

impl LatticeParams {
    /// U1 follows from the atom's hyperfine state, U1 = U0 |m_F| / 2F.
    pub fn new(u0: f64, a: f64, atom: AtomSpecies) -> Result<Self, PotentialError> {
        if atom.m_f == 0 {
            return Err(PotentialError::Invalid("m_F = 0 has no state-dependent term"));
        }
        if atom.m_f.unsigned_abs() > atom.f {
            return Err(PotentialError::Invalid("|m_F| exceeds F"));
        }
        Self::with_ratio(u0, a, atom, atom.depth_ratio())
    }

    /// Explicit depth ratio r = U0 / U1.
    pub fn with_ratio(u0: f64, a: f64, atom: AtomSpecies, r: f64) -> Result<Self, PotentialError> {
        if !(u0 > 0.0) {
            return Err(PotentialError::Invalid("U0 must be positive"));
        }
        if !(a > 0.0) {
            return Err(PotentialError::Invalid("lattice constant must be positive"));
        }
        if !(atom.mass > 0.0) {
            return Err(PotentialError::Invalid("mass must be positive"));
        }
        if !(r >= 1.0) || !r.is_finite() {
            return Err(PotentialError::Invalid("depth ratio must be finite and at least 1"));
        }
        Ok(Self {
            u0,
            u1: u0 / r,
            a,
            atom,
        })
    }

    /// Equal depths, U1 = U0: the well moves at constant speed.
    pub fn simplified(u0: f64, a: f64, atom: AtomSpecies) -> Result<Self, PotentialError> {
        Self::with_ratio(u0, a, atom, 1.0)
    }

    /// Caesium lattice from a depth in µK and a lattice constant in µm.
    pub fn cesium(u0_uk: f64, a_um: f64) -> Result<Self, PotentialError> {
        Self::new(microkelvin_to_joule(u0_uk), micrometre(a_um), AtomSpecies::cesium())
    }

    pub fn k(&self) -> f64 {
        PI / self.a
    }

    pub fn mass(&self) -> f64 {
        self.atom.mass
    }

    pub fn ratio(&self) -> f64 {
        self.u0 / self.u1
    }

    pub fn is_simplified(&self) -> bool {
        self.u0 == self.u1
    }

    /// Amplitude R of the single-cosine form; the well depth is 2R.
    pub fn amplitude(&self, theta: f64) -> f64 {
        let c = self.u0 * libm::cos(theta);
        let s = self.u1 * libm::sin(theta);
        0.5 * libm::sqrt(c * c + s * s)
    }

    /// Peak-to-trough depth at angle θ: U0 at θ = 0, U1 at θ = π/2.
    pub fn depth(&self, theta: f64) -> f64 {
        2.0 * self.amplitude(theta)
    }

    /// Phase φ of the single-cosine form, continuous in θ with φ(0) = 0.
    pub fn phase(&self, theta: f64, sign: f64) -> f64 {
        let base = libm::atan2(sign * self.u1 * libm::sin(theta), self.u0 * libm::cos(theta));
        let turns = libm::round((sign * theta - base) / (2.0 * PI));
        base + 2.0 * PI * turns
    }

    /// dφ/dθ, the rate at which the minimum follows the polarization.
    pub fn phase_rate(&self, theta: f64, sign: f64) -> f64 {
        let c = self.u0 * libm::cos(theta);
        let s = self.u1 * libm::sin(theta);
        sign * self.u0 * self.u1 / (c * c + s * s)
    }
}

/// Lattice potential energy at `z` for polarization angle `theta`.
pub fn potential(z: f64, theta: f64, params: &LatticeParams, sign: f64) -> f64 {
    let kz2 = 2.0 * params.k() * z;
    0.5 * params.u0 * libm::cos(theta) * libm::cos(kz2) + sign * 0.5 * params.u1 * libm::sin(theta) * libm::sin(kz2)
}

/// σ- and σ+ standing-wave amplitudes for single-beam amplitude `e0`.
pub fn field_components(z: f64, theta: f64, k: f64, e0: f64) -> (Complex64, Complex64) {
    let amp = core::f64::consts::SQRT_2 * e0;
    let minus = Complex64::from_polar(amp, theta / 2.0) * libm::cos(k * z - theta / 2.0);
    let plus = -Complex64::from_polar(amp, -theta / 2.0) * libm::cos(k * z + theta / 2.0);
    (minus, plus)
}

/// Harmonic vibrational frequency ω = k sqrt(2 U_eff / m), rad/s.
pub fn harmonic_frequency(params: &LatticeParams, theta: f64) -> Result<f64, PotentialError> {
    let depth = params.depth(theta);
    if !(depth > params.u0 * 1e-12) {
        return Err(PotentialError::DegenerateDepth { theta });
    }
    Ok(params.k() * libm::sqrt(2.0 * depth / params.mass()))
}

/// Position of the well minimum that sits at a/2 when θ = 0.
///
/// With U0 = U1 the phase equals `sign * θ` and the minimum moves linearly,
/// a/4 per π/2 of rotation.
pub fn minimum_trajectory(theta: f64, params: &LatticeParams, sign: f64) -> f64 {
    (PI + params.phase(theta, sign)) / (2.0 * params.k())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular_to_khz;

    fn fig_params() -> LatticeParams {
        LatticeParams::cesium(100.0, 5.3).unwrap()
    }

    #[test]
    fn value_at_origin() {
        let p = fig_params();
        assert_eq!(potential(0.0, 0.0, &p, 1.0), p.u0 / 2.0);
    }

    #[test]
    fn quarter_turn_leaves_state_dependent_term() {
        let p = fig_params();
        let th = PI / 2.0;
        for i in 0..20 {
            let z = i as f64 * p.a / 20.0;
            let expected = 0.5 * p.u1 * libm::sin(2.0 * p.k() * z);
            assert!((potential(z, th, &p, 1.0) - expected).abs() < 1e-12 * p.u0);
        }
        assert!((p.depth(th) - p.u1).abs() < 1e-12 * p.u0);
    }

    #[test]
    fn cesium_ratio_is_eight() {
        let p = fig_params();
        assert!((p.ratio() - 8.0).abs() < 1e-12);
        let z = 0.37 * p.a;
        assert_eq!(potential(z, 0.0, &p, 1.0), potential(z, 0.0, &p, -1.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        let cs = AtomSpecies::cesium();
        assert!(LatticeParams::new(-1.0, 1e-6, cs).is_err());
        assert!(LatticeParams::new(1e-27, 0.0, cs).is_err());
        assert!(LatticeParams::new(1e-27, 1e-6, AtomSpecies { m_f: 5, ..cs }).is_err());
        assert!(LatticeParams::new(1e-27, 1e-6, AtomSpecies { m_f: 0, ..cs }).is_err());
    }

    #[test]
    fn field_amplitudes() {
        let (k, e0) = (1.3, 2.0);
        for i in 0..10 {
            let z = i as f64 * 0.17;
            let (m, p) = field_components(z, 0.0, k, e0);
            let expected = core::f64::consts::SQRT_2 * e0 * libm::fabs(libm::cos(k * z));
            assert!((m.norm() - expected).abs() < 1e-12);
            assert!((p.norm() - expected).abs() < 1e-12);
        }
        let (m, p) = field_components(0.0, PI, k, e0);
        assert!(m.norm() < 1e-12 && p.norm() < 1e-12);
    }

    #[test]
    fn field_intensity_averages_independent_of_theta() {
        let (k, e0) = (PI, 1.0);
        let mean = |theta: f64| {
            let n = 4096;
            (0..n)
                .map(|i| {
                    let (m, p) = field_components(i as f64 / n as f64, theta, k, e0);
                    m.norm_sqr() + p.norm_sqr()
                })
                .sum::<f64>()
                / n as f64
        };
        let reference = mean(0.0);
        assert!((reference - 2.0).abs() < 1e-12);
        for th in [0.3, 1.0, PI / 2.0, 2.5, PI] {
            assert!((mean(th) - reference).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_frequency_near_ten_and_a_half_khz() {
        let p = fig_params();
        let nu = angular_to_khz(harmonic_frequency(&p, 0.0).unwrap());
        assert!((nu - 10.5).abs() / 10.5 < 0.01, "nu = {nu}");
        let nu_half = angular_to_khz(harmonic_frequency(&p, PI / 2.0).unwrap());
        assert!((nu_half - nu / libm::sqrt(8.0)).abs() < 1e-9);
    }

    #[test]
    fn frequency_scales_with_root_depth() {
        let p = fig_params();
        let deeper = LatticeParams { u0: 4.0 * p.u0, u1: 4.0 * p.u1, ..p };
        let w = harmonic_frequency(&p, 0.3).unwrap();
        assert!((harmonic_frequency(&deeper, 0.3).unwrap() - 2.0 * w).abs() < 1e-9 * w);
    }

    #[test]
    fn degenerate_depth_reported() {
        let p = LatticeParams {
            u1: 0.0,
            ..fig_params()
        };
        assert!(matches!(harmonic_frequency(&p, PI / 2.0), Err(PotentialError::DegenerateDepth { .. })));
    }

    #[test]
    fn curvature_matches_finite_difference() {
        let p = fig_params();
        for &(th, s) in &[(0.0, 1.0), (0.7, 1.0), (PI / 2.0, -1.0), (2.9, 1.0)] {
            let z0 = minimum_trajectory(th, &p, s);
            let h = p.a * 1e-4;
            let d2 = (potential(z0 + h, th, &p, s) - 2.0 * potential(z0, th, &p, s) + potential(z0 - h, th, &p, s)) / (h * h);
            let w_fd = libm::sqrt(d2 / p.mass());
            let w = harmonic_frequency(&p, th).unwrap();
            assert!((w_fd - w).abs() / w < 1e-6, "theta {th}: {w_fd} vs {w}");
        }
    }

    #[test]
    fn simplified_minimum_moves_linearly() {
        let p = LatticeParams::simplified(microkelvin_to_joule(100.0), 5.3e-6, AtomSpecies::cesium()).unwrap();
        let z0 = minimum_trajectory(0.0, &p, 1.0);
        assert!((minimum_trajectory(PI, &p, 1.0) - z0 - p.a / 2.0).abs() < 1e-15);
        assert!((minimum_trajectory(PI / 2.0, &p, 1.0) - z0 - p.a / 4.0).abs() < 1e-15);
        assert!((minimum_trajectory(PI, &p, -1.0) - z0 + p.a / 2.0).abs() < 1e-15);
    }

    #[test]
    fn realistic_minimum_reaches_half_period() {
        let p = fig_params();
        let z0 = minimum_trajectory(0.0, &p, 1.0);
        assert!((minimum_trajectory(PI, &p, 1.0) - z0 - p.a / 2.0).abs() < 1e-15);
        // Mobile leg: opposite sign running back from π continues forward.
        let back = minimum_trajectory(0.0, &p, -1.0) - minimum_trajectory(PI, &p, -1.0);
        assert!((back - p.a / 2.0).abs() < 1e-15);
        // Minimum of the sampled potential agrees with the closed form.
        let th = 1.1;
        let zm = minimum_trajectory(th, &p, 1.0);
        for d in [-0.01, 0.01] {
            assert!(potential(zm + d * p.a, th, &p, 1.0) > potential(zm, th, &p, 1.0));
        }
        assert!((potential(zm, th, &p, 1.0) + p.amplitude(th)).abs() < 1e-12 * p.u0);
    }

    #[test]
    fn periodic_in_z_and_theta() {
        let p = fig_params();
        for i in 0..7 {
            let z = i as f64 * 0.31e-6;
            let th = i as f64 * 0.4;
            let u = potential(z, th, &p, 1.0);
            assert!((potential(z + p.a, th, &p, 1.0) - u).abs() < 1e-9 * p.u0);
            assert!((potential(z, th + 2.0 * PI, &p, 1.0) - u).abs() < 1e-9 * p.u0);
        }
    }
}
