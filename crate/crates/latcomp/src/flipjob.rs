//! The `flip` command: each section of the configuration becomes one JSON
//! record with its inputs and results.

use latcomp_core::flip::{
    addressing_selectivity, compare_three_level, effective_hamiltonian, frequency_selectivity, landau_zener, rabi_formula,
    simulate_chirped_passage, simulate_pi_pulse, AddressingBeam, Chirp, LambdaSystem, Pulse, PulseShape,
};
use latcomp_core::units::{angular_to_khz, khz_to_angular};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::config::{FlipConfig, ShapeName};
use crate::error::Result;

fn us(t: f64) -> f64 {
    t * 1e-6
}

pub fn run_flip(cfg: &FlipConfig) -> Result<Value> {
    let mut out = Map::new();

    if let Some(l) = &cfg.lambda {
        let system = LambdaSystem::new(
            Complex64::new(khz_to_angular(l.w01_khz), 0.0),
            Complex64::new(khz_to_angular(l.w12_khz), 0.0),
            khz_to_angular(l.delta01_khz),
            khz_to_angular(l.delta12_khz),
        );
        let eff = effective_hamiltonian(&system)?;
        let mut rec = json!({
            "input": {
                "W01_kHz": l.w01_khz, "W12_kHz": l.w12_khz,
                "Delta01_kHz": l.delta01_khz, "Delta12_kHz": l.delta12_khz,
            },
            "W02_kHz": angular_to_khz(eff.w02.re),
            "stark0_kHz": angular_to_khz(eff.stark0),
            "stark2_kHz": angular_to_khz(eff.stark2),
            "net_detuning_kHz": angular_to_khz(eff.detuning),
            "validity_ratio": system.validity_ratio(),
        });
        if let Some(hold) = l.hold_us {
            let (full, two) = compare_three_level(&system, us(hold))?;
            rec["three_level"] = json!({ "hold_us": hold, "P": full, "P_effective": two });
        }
        out.insert("lambda".into(), rec);
    }

    if let Some(p) = &cfg.pulse {
        let shape = match p.shape {
            ShapeName::Square => PulseShape::Square,
            ShapeName::Blackman => PulseShape::Blackman,
        };
        let pulse = Pulse::new(shape, p.area_rad, us(p.duration_us))?;
        let detuning = khz_to_angular(p.detuning_khz);
        let transfer = simulate_pi_pulse(&pulse, detuning)?;
        let mut rec = json!({
            "input": { "shape": format!("{:?}", shape).to_lowercase(), "area_rad": p.area_rad, "duration_us": p.duration_us, "detuning_kHz": p.detuning_khz },
            "peak_rabi_kHz": angular_to_khz(pulse.peak_rabi()),
            "transfer": transfer,
        });
        if shape == PulseShape::Square {
            rec["transfer_formula"] = json!(rabi_formula(pulse.peak_rabi(), detuning, pulse.duration));
        }
        out.insert("pulse".into(), rec);
    }

    if let Some(c) = &cfg.chirp {
        let chirp = Chirp {
            coupling: khz_to_angular(c.coupling_khz),
            rate: khz_to_angular(c.rate_khz_per_us) / 1e-6,
            span: khz_to_angular(c.span_khz),
        };
        out.insert(
            "chirp".into(),
            json!({
                "input": { "coupling_kHz": c.coupling_khz, "rate_kHz_per_us": c.rate_khz_per_us, "span_kHz": c.span_khz },
                "adiabaticity": chirp.adiabaticity(),
                "transfer": simulate_chirped_passage(&chirp)?,
                "landau_zener": landau_zener(&chirp),
            }),
        );
    }

    if let Some(a) = &cfg.addressing {
        let mut beam = AddressingBeam::new(a.power_uw * 1e-6, a.waist_um * 1e-6)?;
        beam.wavelength = a.wavelength_nm * 1e-9;
        out.insert(
            "addressing".into(),
            json!({
                "input": { "power_uW": a.power_uw, "wavelength_nm": a.wavelength_nm, "waist_um": a.waist_um, "spacing_um": a.spacing_um },
                "rayleigh_range_um": beam.rayleigh_range() * 1e6,
                "intensity_ratio": addressing_selectivity(&beam, a.spacing_um * 1e-6)?,
            }),
        );
    }

    if let Some(s) = &cfg.selectivity {
        out.insert(
            "selectivity".into(),
            json!({
                "input": { "pulse_us": s.pulse_us, "shift_difference_kHz": s.shift_difference_khz },
                "off_target_bound": frequency_selectivity(us(s.pulse_us), s.shift_difference_khz * 1e3)?,
            }),
        );
    }

    Ok(Value::Object(out))
}
