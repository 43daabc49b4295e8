//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p spinpair-core --test acceptance`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinpair_core::compiler::{
    estimate_clock, export_schedule, lower, parse_circuit, parse_schedule, verify_lowering, TimingModel,
};
use spinpair_core::dynamics::{
    evolve, pulse_segment, qubit_echo, resonant_pulse, rotating_frame, synthesize_resonant_pulse, PulseSchedule,
    PulseSegment,
};
use spinpair_core::encoding::{
    dfs_basis, leakage_witness, logical_operators_from_restriction, logical_product_basis, logical_qubit_basis,
};
use spinpair_core::gates::{build_nand_encoded, build_nand_physical, calibration, nand_matrix, GateSequence};
use spinpair_core::linalg::{c64, compare_up_to_global_phase, expm_hermitian, half_pauli_x, ComplexMatrix};
use spinpair_core::spin::{exchange_gate, heisenberg, spin_operator, total_sz, zeeman, DeviceConfig, SpinAxis};
use spinpair_core::{duration_x, duration_z};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let elapsed = start.elapsed();
    ensure(
        elapsed < limit,
        format!(
            "runtime {:.2} s exceeds {:.0} s",
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        ),
    )
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn ac1_physical_nand() -> Outcome {
    let start = Instant::now();
    let u = build_nand_physical();
    let f = compare_up_to_global_phase(&nand_matrix(), &u).map_err(e)?.fidelity;
    within(start, Duration::from_secs(1))?;
    ensure(1.0 - f <= 1e-10, format!("fidelity {f:.15}"))?;
    Ok(format!("fidelity 1-{:.1e}, calibration {}", 1.0 - f, calibration()))
}

fn ac2_encoded_nand() -> Outcome {
    let start = Instant::now();
    let device = DeviceConfig::demo();
    let u = build_nand_encoded(&device).map_err(e)?;
    let basis = logical_product_basis(4, &[(1, 2), (3, 4)]).map_err(e)?;
    let report = spinpair_core::gates::verify_controlled_phase(&u, &basis).map_err(e)?;
    let ops = GateSequence::encoded_nand((2, 3)).total_exchange_ops();
    within(start, Duration::from_secs(1))?;
    ensure(report.leakage <= 1e-10, format!("leakage {:e}", report.leakage))?;
    ensure(ops == 2, format!("{ops} exchange operations"))?;
    ensure(
        1.0 - report.fidelity_vs_nand <= 1e-10,
        format!("fidelity {:.15}", report.fidelity_vs_nand),
    )?;
    Ok(format!(
        "leakage {:.1e}, exchange ops {ops}, fidelity 1-{:.1e}, residual Z ({:.2e}, {:.2e})",
        report.leakage,
        1.0 - report.fidelity_vs_nand,
        report.residual_local_z.0,
        report.residual_local_z.1
    ))
}

fn ac3_operator_mappings() -> Outcome {
    let h = heisenberg(2, 1, 2).map_err(e)?;
    let x = logical_operators_from_restriction(2, (1, 2), &h).map_err(e)?;
    ensure(x.axis == Some(SpinAxis::X), format!("exchange maps to {:?}", x.axis))?;
    ensure(
        (x.coefficient - 1.0).abs() <= 1e-12,
        format!("Σx coefficient {}", x.coefficient),
    )?;
    ensure(
        (x.identity_shift + 0.25).abs() <= 1e-12,
        format!("shift {}", x.identity_shift),
    )?;
    let (g1, g2, b) = (1.0, 1.5, 1.0);
    let z_op = zeeman(&DeviceConfig::single_qubit(g1, g2, b));
    let z = logical_operators_from_restriction(2, (1, 2), &z_op).map_err(e)?;
    let delta_gb = (g2 - g1) * b;
    ensure(z.axis == Some(SpinAxis::Z), format!("zeeman maps to {:?}", z.axis))?;
    ensure(
        (z.coefficient.abs() - delta_gb).abs() <= 1e-12,
        format!("Σz coefficient {}", z.coefficient),
    )?;
    let rebuilt = z.reconstruct();
    let restricted = logical_qubit_basis(2, (1, 2)).map_err(e)?.restrict(&z_op).map_err(e)?;
    ensure(rebuilt.max_abs_diff(&restricted) <= 1e-12, "zeeman reconstruction")?;
    Ok(format!(
        "H12 -> Σx {:+} {:+}·I; Zeeman -> {:+}·ΔgB·Σz {:+}·I",
        x.coefficient,
        x.identity_shift,
        z.coefficient / delta_gb,
        z.identity_shift
    ))
}

fn ac4_leakage_witness() -> Outcome {
    let w = leakage_witness((2, 3), "1010").map_err(e)?;
    ensure(
        w.components.len() == 1,
        format!("{} out-of-space components", w.components.len()),
    )?;
    ensure(w.out_label() == Some("1100"), format!("out label {:?}", w.out_label()))?;
    let amp = w.amplitude();
    ensure((amp - c64(0.5, 0.0)).norm() <= 1e-12, format!("amplitude {amp}"))?;
    Ok(format!("<1100|S2·S3|1010> = {:.3}, unique", amp.re))
}

fn ac5_collective_immunity() -> Outcome {
    let device = DeviceConfig::single_qubit(1.3, 1.3, 0.8);
    let basis = logical_qubit_basis(2, (1, 2)).map_err(e)?;
    let r = basis.restrict(&zeeman(&device)).map_err(e)?;
    let scalar = ComplexMatrix::identity(2).scale(r.get(0, 0));
    let dev = r.max_abs_diff(&scalar);
    ensure(dev <= 1e-12, format!("zeeman restriction deviates from c·I by {dev:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut restricted = Vec::new();
    for _ in 0..20 {
        let theta = rng.random_range(-2.0 * PI..2.0 * PI);
        restricted.push(basis.restrict(&exchange_gate(2, 1, 2, theta).map_err(e)?).map_err(e)?);
        let t = rng.random_range(0.0..20.0);
        restricted.push(
            basis
                .restrict(&expm_hermitian(&zeeman(&device), t).map_err(e)?)
                .map_err(e)?,
        );
    }
    let mut worst: f64 = 0.0;
    for a in &restricted {
        for b in &restricted {
            worst = worst.max(a.commutator(b).max_abs());
        }
    }
    ensure(worst <= 1e-10, format!("max commutator {worst:e}"))?;
    Ok(format!(
        "zeeman ∝ I within {dev:.1e}; 40 generated unitaries commute within {worst:.1e}"
    ))
}

fn rotating_logical(schedule: &PulseSchedule) -> Result<(ComplexMatrix, f64), String> {
    let device = schedule.device();
    let r = evolve(schedule, None).map_err(e)?;
    let u_rot = rotating_frame(&r.final_unitary, &zeeman(device), schedule.duration()).map_err(e)?;
    let logical = logical_qubit_basis(2, (1, 2)).map_err(e)?.restrict(&u_rot).map_err(e)?;
    Ok((logical, r.convergence_estimate))
}

fn ac6_resonance() -> Outcome {
    let start = Instant::now();
    let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
    let omega = 0.5;
    let x_pi = expm_hermitian(&half_pauli_x(), PI).map_err(e)?;

    let pi = synthesize_resonant_pulse(&device, PI, 0.05 * omega).map_err(e)?;
    let (u, conv_pi) = rotating_logical(&pi)?;
    let f_pi = compare_up_to_global_phase(&x_pi, &u).map_err(e)?.fidelity;

    let half = resonant_pulse(&device, 0, SpinAxis::X, FRAC_PI_2, 0.05)
        .map_err(e)?
        .ok_or("empty π/2 pulse")?;
    let seg = pulse_segment(&device, &[half], 0.0);
    let twice = PulseSchedule::new(device.clone(), vec![seg.clone(), seg]).map_err(e)?;
    let (u2, conv_half) = rotating_logical(&twice)?;
    let f_half = compare_up_to_global_phase(&x_pi, &u2).map_err(e)?.fidelity;

    within(start, Duration::from_secs(30))?;
    let conv = conv_pi.max(conv_half);
    ensure(f_pi >= 0.99, format!("π fidelity {f_pi:.6}"))?;
    ensure(f_half >= 0.99, format!("2×π/2 fidelity {f_half:.6}"))?;
    ensure(conv < 1e-6, format!("convergence estimate {conv:e}"))?;
    Ok(format!(
        "π fidelity {f_pi:.6}, 2×π/2 fidelity {f_half:.6}, convergence {conv:.1e}, π duration {:.1}",
        pi.duration()
    ))
}

fn ac7_echo() -> Outcome {
    let device = DeviceConfig::demo();
    let idle = 10_000.0;
    let basis = logical_product_basis(4, &[(1, 2), (3, 4)]).map_err(e)?;
    let echo = qubit_echo(&device, idle).map_err(e)?;
    let reference = basis
        .restrict(&evolve(&echo, None).map_err(e)?.final_unitary)
        .map_err(e)?;
    let free = PulseSchedule::new(device.clone(), vec![PulseSegment::idle(idle)]).map_err(e)?;
    let free_reference = basis
        .restrict(&evolve(&free, None).map_err(e)?.final_unitary)
        .map_err(e)?;
    let mut worst_echo: f64 = 1.0;
    let mut best_control: f64 = 0.0;
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = device.g_factors().to_vec();
        for q in 0..device.n_logical() {
            let phase = rng.random_range(FRAC_PI_2..PI);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let delta = sign * phase / idle;
            g[2 * q] += delta / device.field_b();
        }
        let disordered = device.with_g_factors(g).map_err(e)?;
        let u = evolve(&echo.with_device(disordered.clone()).map_err(e)?, None).map_err(e)?;
        let r = basis.restrict(&u.final_unitary).map_err(e)?;
        worst_echo = worst_echo.min(compare_up_to_global_phase(&reference, &r).map_err(e)?.fidelity);
        let v = evolve(&free.with_device(disordered).map_err(e)?, None).map_err(e)?;
        let rv = basis.restrict(&v.final_unitary).map_err(e)?;
        best_control = best_control.max(compare_up_to_global_phase(&free_reference, &rv).map_err(e)?.fidelity);
    }
    ensure(worst_echo >= 0.99, format!("echo fidelity {worst_echo:.6}"))?;
    ensure(
        best_control < 0.9,
        format!("no-echo control fidelity {best_control:.6}"),
    )?;
    Ok(format!(
        "5 seeds: echo fidelity >= {worst_echo:.6}, no-echo control <= {best_control:.4}"
    ))
}

fn ac8_timing() -> Outcome {
    let tz = duration_z(PI, &TimingModel::new(1.0, 1.0, 1.0)).map_err(e)?;
    let tx = duration_x(PI, &TimingModel::new(1.0, 1.0, 1.0)).map_err(e)?;
    ensure(tz == 35.0, format!("t_z(π) = {tz}"))?;
    ensure(tx == 0.5, format!("t_x(π) = {tx}"))?;
    let si_ge = duration_z(PI, &TimingModel::si_ge()).map_err(e)?;
    ensure((si_ge - 40.23).abs() <= 0.01, format!("Si/Ge t_z(π) = {si_ge}"))?;
    let clock = estimate_clock(&TimingModel::si_ge()).map_err(e)?;
    ensure(clock.reference_clock_ghz == 6.0, "reference clock missing")?;
    ensure(clock.discrepancy_flag, "discrepancy not flagged")?;
    Ok(format!(
        "t_z(π)=35 ps, t_x(π)=0.5 ps, Si/Ge t_z(π)={si_ge:.2} ps, nAND {:.1} ps -> {:.1} GHz vs reference ~{} GHz (flagged)",
        clock.nand_duration_ps, clock.clock_ghz, clock.reference_clock_ghz
    ))
}

fn ac9_compiler() -> Outcome {
    let start = Instant::now();
    let device = DeviceConfig::demo();
    let timing = TimingModel::for_device(&device, 1.0);
    let units = timing.units();
    let mut parts = Vec::new();
    for (name, text) in [
        ("rx", "qubits 2\nrx q0 pi/2\n"),
        ("rz", "qubits 2\nrz q0 pi\n"),
        ("nand", "qubits 2\nnand q0 q1\n"),
        ("cnot", "qubits 2\ncnot q0 q1\n"),
    ] {
        let circuit = parse_circuit(text).map_err(e)?;
        let (schedule, stats) = lower(&circuit, &device, &timing).map_err(e)?;
        let check = verify_lowering(&circuit, &schedule).map_err(e)?;
        ensure(
            check.z_corrected_fidelity >= 1.0 - 1e-6,
            format!("{name}: fidelity {:.12}", check.z_corrected_fidelity),
        )?;
        let exported = export_schedule(&schedule, &stats, &units);
        let again = parse_schedule(&exported).map_err(e)?.render();
        ensure(again == exported, format!("{name}: schedule JSON does not round-trip"))?;
        if name == "nand" {
            ensure(
                stats.exchange_op_count == 2,
                format!("nand uses {} exchange ops", stats.exchange_op_count),
            )?;
        }
        parts.push(format!("{name} 1-{:.0e}", 1.0 - check.z_corrected_fidelity));
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{}; JSON round-trips", parts.join(", ")))
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(dim, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&a + &a.adjoint()).scale_real(0.5)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn ac10_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let instances = 60;
    let i = c64(0.0, 1.0);
    for _ in 0..instances {
        let n = rng.random_range(1..=4);
        let s = rng.random_range(1..=n);
        let op = |a| spin_operator(n, s, a).map_err(e);
        let (x, y, z) = (op(SpinAxis::X)?, op(SpinAxis::Y)?, op(SpinAxis::Z)?);
        for (a, b, c) in [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)] {
            ensure(a.commutator(b).max_abs_diff(&c.scale(i)) <= 1e-12, "su(2) commutator")?;
        }
    }
    for _ in 0..instances {
        let n = rng.random_range(2..=5);
        let sz = total_sz(n);
        let a = rng.random_range(1..=n);
        let b = (a % n) + 1;
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.5)).collect();
        let device =
            DeviceConfig::new(g, rng.random_range(0.1..3.0), Vec::new(), spinpair_core::Layout::Custom).map_err(e)?;
        for gen in [heisenberg(n, a.min(b), a.max(b)).map_err(e)?, zeeman(&device)] {
            ensure(
                gen.commutator(&sz).max_abs() <= 1e-12,
                "generator does not conserve total Sz",
            )?;
        }
    }
    for _ in 0..instances {
        let c = rng.random_range(1..=8usize);
        let k = rng.random_range(0..=c);
        let m = c as f64 / 2.0 - k as f64;
        let dim = dfs_basis(c, m).map_err(e)?.dim();
        ensure(dim == binomial(c, k), format!("dim DFS_{c}({m}) = {dim}"))?;
    }
    for _ in 0..instances {
        let dim = rng.random_range(2..=16);
        let h = random_hermitian(&mut rng, dim);
        let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let lhs = &expm_hermitian(&h, a).map_err(e)? * &expm_hermitian(&h, b).map_err(e)?;
        let rhs = expm_hermitian(&h, a + b).map_err(e)?;
        ensure(lhs.max_abs_diff(&rhs) <= 1e-10, "exponential additivity")?;
    }
    for _ in 0..instances {
        let dim = rng.random_range(2..=16);
        let u = expm_hermitian(&random_hermitian(&mut rng, dim), 1.0).map_err(e)?;
        let v = expm_hermitian(&random_hermitian(&mut rng, dim), 1.0).map_err(e)?;
        let f1 = compare_up_to_global_phase(&u, &v).map_err(e)?.fidelity;
        let f2 = compare_up_to_global_phase(&v, &u).map_err(e)?.fidelity;
        ensure((f1 - f2).abs() <= 1e-12, "fidelity asymmetry")?;
    }
    Ok(format!("5 suites × {instances} random instances"))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC-1", "physical nAND", ac1_physical_nand),
        ("AC-2", "encoded nAND", ac2_encoded_nand),
        ("AC-3", "operator mappings", ac3_operator_mappings),
        ("AC-4", "leakage witness", ac4_leakage_witness),
        ("AC-5", "collective-field immunity", ac5_collective_immunity),
        ("AC-6", "resonant pulses", ac6_resonance),
        ("AC-7", "qubit echo", ac7_echo),
        ("AC-8", "timing", ac8_timing),
        ("AC-9", "end-to-end compiler", ac9_compiler),
        ("AC-10", "property suites", ac10_properties),
    ];
    let mut failures = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{id:<6} PASS  {name}: {detail} [{secs:.2} s]"),
            Err(detail) => {
                failures += 1;
                println!("{id:<6} FAIL  {name}: {detail} [{secs:.2} s]");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
