//! End-to-end acceptance checks. Runs without the libtest harness so the
//! report is always printed: one PASS/FAIL line per check, and a non-zero
//! exit if any check fails.

use std::f64::consts::PI;
use std::time::Instant;

use latcomp::montecarlo::{run_trials, trial_seed};
use latcomp::physics::transition_frequency_khz;
use latcomp::DEFAULT_STEP_SECONDS;
use latcomp_core::flip::{
    compare_three_level, effective_hamiltonian, landau_zener, simulate_chirped_passage, simulate_pi_pulse, Chirp, LambdaSystem,
    Pulse, PulseShape,
};
use latcomp_core::lattice::{is_compacted, random_fill};
use latcomp_core::planner::{ceil_log2, plan, worst_case_bound};
use latcomp_core::potential::{harmonic_frequency, potential, AtomSpecies, LatticeParams};
use latcomp_core::shift::{
    analytic_fidelity, analytic_heating, optimal_timing, simulate_cycle, simulate_shift, static_energy, worst_timing,
    ShiftExperiment, ShiftResult,
};
use latcomp_core::simulator::execute;
use latcomp_core::spectral::{bound_states, ChebyshevConfig, ChebyshevPropagator, Hamiltonian, SpatialGrid, Wavefunction};
use latcomp_core::units::{angular_to_khz, joule_to_khz, joule_to_microkelvin, microkelvin_to_joule, millisecond, HBAR};
use num_complex::Complex64;

const U0_UK: f64 = 100.0;
const A_UM: f64 = 5.3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn realistic(r: f64) -> LatticeParams {
    LatticeParams::with_ratio(microkelvin_to_joule(U0_UK), A_UM * 1e-6, AtomSpecies::cesium(), r).unwrap()
}

fn simplified() -> LatticeParams {
    LatticeParams::simplified(microkelvin_to_joule(U0_UK), A_UM * 1e-6, AtomSpecies::cesium()).unwrap()
}

fn shift(params: LatticeParams, tau: f64) -> ShiftResult {
    simulate_shift(&ShiftExperiment::new(params, tau)).unwrap()
}

/// Side length of trial `t` in 1..=max, spread over the whole range.
fn side(seed: u64, max: usize) -> usize {
    1 + (seed % max as u64) as usize
}

fn criterion_1() -> Outcome {
    const TRIALS: usize = 1000;
    let start = Instant::now();
    let mut failures = 0;
    let mut grids = 0;
    for (dims, max) in [(1usize, 10_000usize), (2, 64), (3, 16)] {
        for t in 0..TRIALS {
            let seed = trial_seed(1, dims, t);
            let p = [0.3, 0.5, 0.7][t % 3];
            let n = side(seed.rotate_left(17), max);
            let grid = random_fill(&vec![n; dims], p, seed).unwrap();
            match execute(&grid, &plan(&grid)) {
                Ok(r) if is_compacted(&r.final_grid) && r.final_grid.atom_count() == grid.atom_count() => {}
                _ => failures += 1,
            }
            grids += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(failures == 0 && secs < 60.0, format!("{grids} grids, {failures} failures, {secs:.1} s"))
}

fn criterion_2() -> Outcome {
    let mut mismatches = 0;
    for t in 0..1000 {
        let seed = trial_seed(2, 1, t);
        let n = side(seed.rotate_left(17), 10_000);
        let grid = random_fill(&[n], [0.3, 0.5, 0.7][t % 3], seed).unwrap();
        let row = grid.occupancy();
        // Each vacancy with an atom somewhere to its right costs one step.
        let mut oracle = 0;
        let mut atom_right = false;
        for &o in row.iter().rev() {
            if o {
                atom_right = true;
            } else if atom_right {
                oracle += 1;
            }
        }
        if plan(&grid).shift_cost() != oracle {
            mismatches += 1;
        }
    }
    let trials = run_trials(1, 1000, 0.5, 1000, 2).unwrap();
    let costs: Vec<f64> = trials.iter().map(|r| r.total as f64).collect();
    let mean = costs.iter().sum::<f64>() / costs.len() as f64;
    let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (costs.len() - 1) as f64;
    let stderr = (var / costs.len() as f64).sqrt();
    // The last atom sits a geometric number of sites from the end, so the
    // expected cost is (1 - p) n minus a bias below one.
    let pass = mismatches == 0 && (mean - 500.0).abs() <= 3.0 * stderr;
    outcome(pass, format!("oracle mismatches {mismatches}/1000; mean {mean:.2} ± {stderr:.2} (target 500)"))
}

fn criterion_3() -> Outcome {
    let mut over = 0;
    let mut wrong_depth = 0;
    let mut fallback = 0;
    let mut routable = 0;
    for (dims, sizes) in [(2usize, vec![2usize, 3, 5, 8, 13, 16, 31, 32, 47, 64]), (3, vec![2, 3, 5, 8, 11, 16])] {
        for &n in &sizes {
            for t in 0..40 {
                let grid = random_fill(&vec![n; dims], [0.3, 0.5, 0.7][t % 3], trial_seed(3, n * dims, t)).unwrap();
                let s = plan(&grid);
                let b = s.balance().unwrap();
                if b.fallback {
                    fallback += 1;
                    continue;
                }
                routable += 1;
                let slack = if dims == 2 { 2 * ceil_log2(n) } else { 4 * ceil_log2(n) };
                if s.shift_cost() > worst_case_bound(dims, n) + slack {
                    over += 1;
                }
                let depth = if dims == 2 { ceil_log2(n) } else { 2 * ceil_log2(n) };
                if b.depth != depth {
                    wrong_depth += 1;
                }
            }
        }
    }
    outcome(
        over == 0 && wrong_depth == 0,
        format!("{routable} routable: {over} over bound, {wrong_depth} wrong depth; {fallback} fallback reported separately"),
    )
}

fn criterion_4() -> Outcome {
    let p = realistic(8.0);
    let nu0 = transition_frequency_khz(&p, 0.0, 256).unwrap();
    let nu90 = transition_frequency_khz(&p, PI / 2.0, 256).unwrap();
    let pass = (nu0 / 10.5 - 1.0).abs() < 0.01 && (nu90 / 3.66 - 1.0).abs() < 0.02;
    outcome(pass, format!("nu01(0) = {nu0:.3} kHz (10.5 ± 1%), nu01(pi/2) = {nu90:.3} kHz (3.66 ± 2%)"))
}

fn criterion_5() -> Outcome {
    let p = realistic(8.0);
    let grid = SpatialGrid::lattice(p.a, 1, 256).unwrap();
    let u: Vec<f64> = grid.positions().map(|x| potential(x, 0.0, &p, 1.0)).collect();
    let states = bound_states(&grid, p.mass(), &u, 22).unwrap();
    let harmonic = angular_to_khz(harmonic_frequency(&p, 0.0).unwrap());
    let dev: Vec<f64> = (0..=20).map(|k| (harmonic - joule_to_khz(states[k + 1].0 - states[k].0)) / harmonic).collect();
    // Least-squares line through deviation(k).
    let n = dev.len() as f64;
    let mk = (0..dev.len()).map(|k| k as f64).sum::<f64>() / n;
    let md = dev.iter().sum::<f64>() / n;
    let sxy: f64 = dev.iter().enumerate().map(|(k, d)| (k as f64 - mk) * (d - md)).sum();
    let sxx: f64 = (0..dev.len()).map(|k| (k as f64 - mk).powi(2)).sum();
    let syy: f64 = dev.iter().map(|d| (d - md).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    let pass = dev[0].abs() < 3e-3 && (dev[20] - 0.03).abs() <= 0.01 && r2 > 0.99;
    outcome(pass, format!("deviation k=0: {:.2e}, k=20: {:.2}%, linear R² = {r2:.5}", dev[0], 100.0 * dev[20]))
}

struct PhysicsLog {
    norm_drift: f64,
}

fn criterion_6(log: &mut PhysicsLog) -> Outcome {
    let p = simplified();
    let mut worst_heat: f64 = 0.0;
    let mut worst_fid: f64 = 0.0;
    let mut above_short = 0;
    for i in 0..10 {
        let tau = millisecond(0.2 + 3.8 * i as f64 / 9.0);
        let r = shift(p, tau);
        log.norm_drift = log.norm_drift.max(r.norm_drift);
        let (_, e2) = analytic_heating(tau, &p);
        let f = analytic_fidelity(tau, &p).unwrap();
        worst_heat = worst_heat.max((r.max_heating - e2).abs() / e2);
        worst_fid = worst_fid.max((r.fidelity - f).abs() / f);
        if tau <= millisecond(1.0) && r.fidelity > f {
            above_short += 1;
        }
    }
    let pass = worst_heat <= 0.01 && worst_fid <= 0.02 && above_short == 0;
    outcome(
        pass,
        format!("10 durations: worst |dE/2E - 1| {worst_heat:.2e}, worst fidelity error {worst_fid:.2e}, {above_short} short-tau points above analytic"),
    )
}

fn criterion_7(log: &mut PhysicsLog) -> Outcome {
    let p8 = realistic(8.0);
    let tau6 = optimal_timing(millisecond(6.0), &p8).unwrap();
    let long = shift(p8, tau6);
    let short = shift(p8, millisecond(2.0));
    let f3 = shift(realistic(3.0), millisecond(3.0));
    let f2 = shift(realistic(2.0), millisecond(3.0));
    for r in [&long, &short, &f3, &f2] {
        log.norm_drift = log.norm_drift.max(r.norm_drift);
    }
    let half_u1 = p8.u1 / 2.0;
    let pass = long.fidelity >= 0.99 && short.max_heating < half_u1 && f3.fidelity > f2.fidelity;
    outcome(
        pass,
        format!(
            "r=8: F({:.3} ms) = {:.4} (ramp minimum {:.4}), dE_max(2 ms) = {:.2} uK < U1/2 = {:.2} uK; F(3 ms): r=3 {:.4} vs r=2 {:.4}",
            tau6 * 1e3,
            long.fidelity,
            long.min_ramp_fidelity,
            joule_to_microkelvin(short.max_heating),
            joule_to_microkelvin(half_u1),
            f3.fidelity,
            f2.fidelity
        ),
    )
}

fn criterion_8(log: &mut PhysicsLog) -> Outcome {
    let p = simplified();
    let good = shift(p, optimal_timing(millisecond(1.0), &p).unwrap());
    let bad = shift(p, worst_timing(millisecond(1.0), &p).unwrap());
    log.norm_drift = log.norm_drift.max(good.norm_drift).max(bad.norm_drift);
    let ratio = bad.final_heating / good.final_heating.abs().max(f64::MIN_POSITIVE);
    outcome(
        good.final_heating < bad.final_heating && ratio >= 5.0,
        format!(
            "residual heating: whole periods ({:.4} ms) {:.3e} uK, half periods ({:.4} ms) {:.3e} uK, suppression {ratio:.1}x",
            good.tau * 1e3,
            joule_to_microkelvin(good.final_heating),
            bad.tau * 1e3,
            joule_to_microkelvin(bad.final_heating)
        ),
    )
}

fn criterion_9(log: &mut PhysicsLog) -> Outcome {
    let p = simplified();
    let exp = ShiftExperiment::new(p, optimal_timing(millisecond(1.0), &p).unwrap());
    let single = simulate_shift(&exp).unwrap();
    let cycle = simulate_cycle(&exp).unwrap();
    for r in cycle.legs.iter().chain([&single]) {
        log.norm_drift = log.norm_drift.max(r.norm_drift);
    }
    let ratio = cycle.total_max_heating / (2.0 * single.max_heating);
    outcome(
        (ratio - 1.0).abs() <= 0.10,
        format!(
            "two shifts {:.4} uK vs 2 x single {:.4} uK (ratio {ratio:.4})",
            joule_to_microkelvin(cycle.total_max_heating),
            joule_to_microkelvin(2.0 * single.max_heating)
        ),
    )
}

fn static_drift() -> f64 {
    let p = simplified();
    let grid = SpatialGrid::lattice(p.a, 4, 256).unwrap();
    let u: Vec<f64> = grid.positions().map(|x| potential(x, 0.0, &p, 1.0)).collect();
    let (u_min, u_max) = u.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    let mut ham = Hamiltonian::new(grid, p.mass(), u).unwrap();
    // Displaced Gaussian: sloshes in the well, exercising every energy scale.
    let sigma = 0.05 * p.a;
    let centre = 1.5 * p.a + 0.1 * p.a;
    let mut psi = Wavefunction::from_fn(grid, |x| Complex64::new((-((x - centre) / sigma).powi(2) / 2.0).exp(), 0.0));
    psi.normalize();
    let config = ChebyshevConfig::enclosing(HBAR / p.u0, u_min, u_max, ham.kinetic_max());
    let mut prop = ChebyshevPropagator::new(config, grid.len()).unwrap();
    let e0 = ham.expectation(&psi);
    let mut drift: f64 = 0.0;
    for i in 1..=5000 {
        prop.step(&mut ham, psi.amplitudes_mut()).unwrap();
        if i % 250 == 0 {
            drift = drift.max((ham.expectation(&psi) - e0).abs() / e0.abs());
        }
    }
    drift
}

fn criterion_10(log: &PhysicsLog) -> Outcome {
    let p = simplified();
    let mut exp = ShiftExperiment::new(p, millisecond(0.5));
    let coarse = simulate_shift(&exp).unwrap();
    exp.dt = Some(exp.time_step() / 2.0);
    let fine = simulate_shift(&exp).unwrap();
    let ec = static_energy(&p, exp.theta_end, exp.sign, &coarse.final_state).unwrap();
    let ef = static_energy(&p, exp.theta_end, exp.sign, &fine.final_state).unwrap();
    let dt_change = (ec - ef).abs() / ef.abs();
    let drift = log.norm_drift.max(coarse.norm_drift).max(fine.norm_drift);
    let conservation = static_drift();
    outcome(
        drift <= 1e-8 && dt_change < 1e-5 && conservation <= 1e-8,
        format!("norm drift {drift:.2e}; halving dt changes final <E> by {dt_change:.2e}; static energy drift {conservation:.2e}"),
    )
}

fn criterion_11() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let s = LambdaSystem::new(Complex64::new(3.0e5, 0.0), Complex64::new(2.0e5, 0.0), 4.0e7, 4.0e7);
    let w02 = effective_hamiltonian(&s).unwrap().w02;
    pass &= w02 == Complex64::new(0.0, 0.0);
    notes.push(format!("equal detunings W02 = {}", w02.norm()));

    let pi = Pulse::new(PulseShape::Square, PI, 20e-6).unwrap();
    let transfer = simulate_pi_pulse(&pi, 0.0).unwrap();
    pass &= (transfer - 1.0).abs() <= 1e-6;
    notes.push(format!("pi-pulse {:.1e} from 1", (transfer - 1.0).abs()));

    let mut lz_err: f64 = 0.0;
    let w = 2.0 * PI * 20e3;
    for coupling in [0.5, 0.75, 1.0, 1.5, 2.0].map(|c| c * w) {
        for g in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let c = Chirp {
                coupling,
                rate: coupling * coupling / g,
                span: 100.0 * coupling,
            };
            lz_err = lz_err.max((simulate_chirped_passage(&c).unwrap() - landau_zener(&c)).abs());
        }
    }
    pass &= lz_err <= 1e-3;
    notes.push(format!("LZ 5x5 max error {lz_err:.1e}"));

    let d = 2.0 * PI * 10e6;
    let mut errs = Vec::new();
    for eps in [0.1, 0.05] {
        let s = LambdaSystem::raman_resonant(eps * d, eps * d, d);
        let t = PI / (2.0 * effective_hamiltonian(&s).unwrap().w02.norm());
        let (full, two) = compare_three_level(&s, t).unwrap();
        errs.push((full[2] - two[1]).abs().max((full[0] - two[0]).abs()) / (eps * eps));
    }
    // Error per ε² stays O(1) and does not grow as ε halves.
    pass &= errs.iter().all(|&e| e < 2.0) && errs[1] <= errs[0];
    notes.push(format!("3-level err/eps² = {:.2}, {:.2}", errs[0], errs[1]));

    let sq = Pulse::new(PulseShape::Square, PI, 20e-6).unwrap();
    let bl = Pulse::new(PulseShape::Blackman, PI, 20e-6).unwrap();
    let det = 3.0 * sq.bandwidth();
    let (ps, pb) = (simulate_pi_pulse(&sq, det).unwrap(), simulate_pi_pulse(&bl, det).unwrap());
    pass &= pb < ps;
    notes.push(format!("3x bandwidth: Blackman {pb:.1e} < square {ps:.1e}"));

    outcome(pass, notes.join("; "))
}

fn criterion_12() -> Outcome {
    let n = 20;
    let slack = 4 * ceil_log2(n);
    let mut worst = 0;
    let mut ok = true;
    for t in 0..10 {
        let grid = random_fill(&[n, n, n], 0.5, trial_seed(12, n, t)).unwrap();
        let schedule = plan(&grid);
        let report = execute(&grid, &schedule).unwrap();
        ok &= is_compacted(&report.final_grid);
        worst = worst.max(report.shift_cost);
    }
    let seconds = worst as f64 * DEFAULT_STEP_SECONDS;
    outcome(
        ok && worst <= 90 + slack && seconds < 0.6,
        format!("20x20x20 at p=0.5, 10 lattices: at most {worst} shifts (limit 90 + {slack}), {seconds:.3} s modeled"),
    )
}

fn main() {
    let mut log = PhysicsLog { norm_drift: 0.0 };
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |id: u32, name: &'static str, o: Outcome| {
        println!("[{}] {id:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };
    record(1, "planner correctness", criterion_1());
    record(2, "1-D costs", criterion_2());
    record(3, "2-D/3-D bounds", criterion_3());
    record(4, "vibrational frequencies", criterion_4());
    record(5, "harmonic and anharmonic spacing", criterion_5());
    record(6, "simplified-case shift", criterion_6(&mut log));
    record(7, "realistic-case thresholds", criterion_7(&mut log));
    record(8, "timing control", criterion_8(&mut log));
    record(9, "heating additivity", criterion_9(&mut log));
    record(10, "numerics hygiene", criterion_10(&log));
    record(11, "flip physics", criterion_11());
    record(12, "end-to-end estimate", criterion_12());
    let failed: Vec<_> = results.iter().filter(|r| !r.2.pass).map(|r| format!("{} {}", r.0, r.1)).collect();
    if failed.is_empty() {
        println!("acceptance: all {} checks passed", results.len());
    } else {
        eprintln!("acceptance: failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
