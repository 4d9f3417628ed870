//! Physical constants and unit conversions.
//!
//! Everything inside the crate is SI: joules, metres, seconds, kilograms.
//! Depths are quoted in microkelvin and frequencies in kilohertz at the
//! edges, so the conversions live here.

use core::f64::consts::PI;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380649e-23;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054572e-34;

/// Mass of a caesium-133 atom, kg.
pub const CS133_MASS: f64 = 2.2069e-25;
/// Ground-state hyperfine splitting of caesium-133, Hz.
pub const CS133_HYPERFINE_HZ: f64 = 9.1926e9;

pub fn microkelvin_to_joule(uk: f64) -> f64 {
    uk * 1e-6 * K_B
}

pub fn joule_to_microkelvin(e: f64) -> f64 {
    e / (1e-6 * K_B)
}

pub fn micrometre(um: f64) -> f64 {
    um * 1e-6
}

pub fn millisecond(ms: f64) -> f64 {
    ms * 1e-3
}

/// Angular frequency (rad/s) to ordinary frequency in kHz.
pub fn angular_to_khz(omega: f64) -> f64 {
    omega / (2.0 * PI) / 1e3
}

pub fn khz_to_angular(khz: f64) -> f64 {
    khz * 1e3 * 2.0 * PI
}

/// Energy (J) to ordinary frequency in kHz via E = h nu.
pub fn joule_to_khz(e: f64) -> f64 {
    angular_to_khz(e / HBAR)
}
