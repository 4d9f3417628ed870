//! JSON configuration documents. Units are part of the field names.

use latcomp_core::potential::{AtomSpecies, LatticeParams};
use latcomp_core::units::{microkelvin_to_joule, micrometre};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::formats::GridDoc;

fn default_f() -> u32 {
    4
}

fn default_mf() -> i32 {
    1
}

/// Lattice and atom. U1 = U0 |mF| / 2F unless `r` or `simplified` is given.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    #[serde(rename = "U0_uK")]
    pub u0_uk: f64,
    pub a_um: f64,
    #[serde(rename = "F", default = "default_f")]
    pub f: u32,
    #[serde(rename = "mF", default = "default_mf")]
    pub m_f: i32,
    /// Explicit U0 / U1.
    #[serde(default)]
    pub r: Option<f64>,
    /// U1 = U0.
    #[serde(default)]
    pub simplified: bool,
}

impl LatticeConfig {
    pub fn params(&self) -> Result<LatticeParams> {
        let atom = AtomSpecies {
            f: self.f,
            m_f: self.m_f,
            ..AtomSpecies::cesium()
        };
        let (u0, a) = (microkelvin_to_joule(self.u0_uk), micrometre(self.a_um));
        let p = if self.simplified {
            LatticeParams::simplified(u0, a, atom)?
        } else if let Some(r) = self.r {
            LatticeParams::with_ratio(u0, a, atom, r)?
        } else {
            LatticeParams::new(u0, a, atom)?
        };
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomGrid {
    pub extents: Vec<usize>,
    pub p_occ: f64,
}

/// Input of `plan`: a grid document, or `{"random": {...}}` drawn with `--seed`.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanInput {
    Grid(GridDoc),
    Random(RandomGrid),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomDoc {
    random: RandomGrid,
}

impl PlanInput {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let value: serde_json::Value = parse(bytes)?;
        if value.get("random").is_some() {
            Ok(PlanInput::Random(parse::<RandomDoc>(bytes)?.random))
        } else {
            Ok(PlanInput::Grid(parse(bytes)?))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Input of `montecarlo`. `n` is the side length: 1-D grids have n sites,
/// 2-D n×n and 3-D n×n×n.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub dims: usize,
    pub n: OneOrMany<usize>,
    pub p_occ: f64,
    pub trials: usize,
}

/// Evenly spaced values, both ends included.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Values {
    List(Vec<f64>),
    Range(Range),
}

impl Values {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Values::List(v) => v.clone(),
            Values::Range(r) => r.values(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SweepAxis {
    /// Shift duration, ms.
    #[serde(rename = "tau_ms")]
    TauMs,
    /// Depth U0, µK.
    #[serde(rename = "U0_uK")]
    DepthUk,
    /// U0 / U1.
    #[serde(rename = "r")]
    Ratio,
    /// Polarization angle, rad: vibrational frequencies, no propagation.
    #[serde(rename = "theta_rad")]
    ThetaRad,
}

fn default_fidelity_samples() -> usize {
    256
}

/// Input of `sweep`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Output file stem, e.g. `fig4_heating`.
    pub figure: String,
    pub lattice: LatticeConfig,
    pub variable: SweepAxis,
    pub values: Values,
    /// Duration when the swept variable is not the duration.
    #[serde(default)]
    pub tau_ms: Option<f64>,
    /// Snap every duration to a whole number of vibrational periods.
    #[serde(default)]
    pub optimize_timing: bool,
    #[serde(default)]
    pub periods: Option<usize>,
    #[serde(default)]
    pub points_per_period: Option<usize>,
    #[serde(default = "default_fidelity_samples")]
    pub fidelity_samples: usize,
    /// Write one trajectory CSV per sweep point.
    #[serde(default)]
    pub trajectories: bool,
}

fn default_states() -> usize {
    21
}

fn default_one() -> usize {
    1
}

fn default_ppp() -> usize {
    128
}

/// Input of `eigen`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenConfig {
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub theta_rad: f64,
    #[serde(default = "default_states")]
    pub n_states: usize,
    #[serde(default = "default_one")]
    pub periods: usize,
    #[serde(default = "default_ppp")]
    pub points_per_period: usize,
    /// Also write the ground state as a binary snapshot.
    #[serde(default)]
    pub snapshot: bool,
}

/// Λ-system couplings and detunings, ordinary frequencies in kHz.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaConfig {
    #[serde(rename = "W01_kHz")]
    pub w01_khz: f64,
    #[serde(rename = "W12_kHz")]
    pub w12_khz: f64,
    #[serde(rename = "Delta01_kHz")]
    pub delta01_khz: f64,
    #[serde(rename = "Delta12_kHz")]
    pub delta12_khz: f64,
    /// Hold time for the three-level versus effective comparison, µs.
    #[serde(default)]
    pub hold_us: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeName {
    Square,
    Blackman,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub shape: ShapeName,
    pub area_rad: f64,
    pub duration_us: f64,
    #[serde(default)]
    #[serde(rename = "detuning_kHz")]
    pub detuning_khz: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChirpConfig {
    /// Off-diagonal coupling W (Rabi frequency 2W), kHz.
    #[serde(rename = "coupling_kHz")]
    pub coupling_khz: f64,
    #[serde(rename = "rate_kHz_per_us")]
    pub rate_khz_per_us: f64,
    #[serde(rename = "span_kHz")]
    pub span_khz: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddressingConfig {
    #[serde(rename = "power_uW")]
    pub power_uw: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength_nm: f64,
    pub waist_um: f64,
    pub spacing_um: f64,
}

fn default_wavelength() -> f64 {
    877.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectivityConfig {
    pub pulse_us: f64,
    #[serde(rename = "shift_difference_kHz")]
    pub shift_difference_khz: f64,
}

/// Input of `flip`; every section is optional.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipConfig {
    #[serde(default)]
    pub lambda: Option<LambdaConfig>,
    #[serde(default)]
    pub pulse: Option<PulseConfig>,
    #[serde(default)]
    pub chirp: Option<ChirpConfig>,
    #[serde(default)]
    pub addressing: Option<AddressingConfig>,
    #[serde(default)]
    pub selectivity: Option<SelectivityConfig>,
}

pub fn parse<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| CliError::parse(format!("config: {e}")))
}
