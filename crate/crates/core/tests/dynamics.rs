use std::f64::consts::PI;

use spinpair_core::dynamics::{
    evolve, evolve_with, qubit_echo, rabi_frequency, rotating_frame, synthesize_resonant_pulse, Coupling,
    EvolveOptions, Integrator, PulseSchedule, PulseSegment,
};
use spinpair_core::encoding::{logical_operators_from_restriction, logical_product_basis, logical_qubit_basis};
use spinpair_core::linalg::{compare_up_to_global_phase, expm_hermitian, half_pauli_x, ComplexMatrix};
use spinpair_core::spin::{zeeman, DeviceConfig};

fn driven(device: &DeviceConfig, duration: f64, amplitude: f64, omega: f64) -> PulseSchedule {
    let seg = PulseSegment::idle(duration).with_coupling(
        (1, 2),
        Coupling::Sinusoid {
            amplitude,
            omega,
            phase: 0.4,
        },
    );
    PulseSchedule::new(device.clone(), vec![seg]).unwrap()
}

fn fixed(schedule: &PulseSchedule, integrator: Integrator, steps: usize) -> ComplexMatrix {
    let options = EvolveOptions {
        integrator,
        fixed_steps: Some(steps),
        ..EvolveOptions::default()
    };
    evolve_with(schedule, None, &options).unwrap().final_unitary
}

#[test]
fn integrator_orders() {
    let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
    let schedule = driven(&device, 6.0, 0.8, 1.3);
    let exact = fixed(&schedule, Integrator::Magnus4, 1 << 14);
    let order = |integrator| {
        let e1 = (&fixed(&schedule, integrator, 64) - &exact).operator_norm();
        let e2 = (&fixed(&schedule, integrator, 128) - &exact).operator_norm();
        (e1 / e2).log2()
    };
    let magnus = order(Integrator::Magnus4);
    let midpoint = order(Integrator::Midpoint);
    assert!((magnus - 4.0).abs() < 0.3, "Magnus order {magnus}");
    assert!((midpoint - 2.0).abs() < 0.3, "midpoint order {midpoint}");
}

#[test]
fn halving_changes_less_than_estimate() {
    let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
    let schedule = driven(&device, 40.0, 0.05, 0.5);
    let r = evolve(&schedule, None).unwrap();
    assert!(r.convergence_estimate > 0.0 && r.convergence_estimate < 1e-8);
    let finer = fixed(&schedule, Integrator::Magnus4, 2 * r.step_count);
    let change = (&finer - &r.final_unitary).operator_norm();
    assert!(
        change < r.convergence_estimate,
        "{change} vs {}",
        r.convergence_estimate
    );
}

#[test]
fn results_are_deterministic_and_unitary() {
    let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
    let schedule = driven(&device, 25.0, 0.05, 0.5);
    let a = evolve(&schedule, None).unwrap();
    let b = evolve(&schedule, None).unwrap();
    assert_eq!(a.final_unitary, b.final_unitary);
    assert!(a.final_unitary.unitarity_deviation() < 1e-8);
}

#[test]
fn constant_schedule_matches_closed_form() {
    let device = DeviceConfig::demo();
    let mut seg = PulseSegment::idle(3.3);
    seg.couplings.insert((2, 3), Coupling::Constant(0.7));
    seg.couplings.insert((1, 2), Coupling::Constant(0.2));
    let schedule = PulseSchedule::new(device.clone(), vec![seg.clone()]).unwrap();
    let h = &(&zeeman(&device) + &spinpair_core::heisenberg(4, 2, 3).unwrap().scale_real(0.7))
        + &spinpair_core::heisenberg(4, 1, 2).unwrap().scale_real(0.2);
    let u = evolve(&schedule, None).unwrap().final_unitary;
    assert!(u.max_abs_diff(&expm_hermitian(&h, 3.3).unwrap()) < 1e-10);
}

#[test]
fn rabi_frequency_is_logical_splitting() {
    for (g1, g2, b) in [(1.0, 2.0, 1.0), (1.565, 2.0, 2.0), (2.0, 1.2, 0.7)] {
        let device = DeviceConfig::single_qubit(g1, g2, b);
        let split = logical_operators_from_restriction(2, (1, 2), &zeeman(&device))
            .unwrap()
            .coefficient
            .abs();
        assert!((rabi_frequency(&device).unwrap() - split).abs() < 1e-12);
    }
}

fn transfer(device: &DeviceConfig, omega: f64, duration: f64, amplitude: f64) -> f64 {
    let schedule = driven(device, duration, amplitude, omega);
    let u = evolve(&schedule, None).unwrap().final_unitary;
    let basis = logical_qubit_basis(2, (1, 2)).unwrap();
    basis.restrict(&u).unwrap().get(1, 0).norm_sqr()
}

#[test]
fn detuning_suppresses_transfer() {
    let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
    let omega = rabi_frequency(&device).unwrap();
    let amplitude = 0.025;
    let rabi = amplitude / 2.0;
    let t_pi = PI / rabi;
    let on = transfer(&device, omega, t_pi, amplitude);
    let off = transfer(&device, omega + 5.0 * rabi, t_pi, amplitude);
    assert!(on > 0.99, "on-resonance transfer {on}");
    assert!(off < on / 5.0, "detuned transfer {off}");
}

#[test]
fn pi_pulse_keeps_leakage_at_zero() {
    let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
    let schedule = synthesize_resonant_pulse(&device, PI, 0.025).unwrap();
    let basis = logical_qubit_basis(2, (1, 2)).unwrap();
    let r = evolve(&schedule, Some(&basis)).unwrap();
    assert!(r.leakage_trace.len() >= 16);
    assert!(r.leakage_trace.iter().all(|&(_, l)| l < 1e-10));
}

#[test]
fn negative_and_half_angles() {
    let device = DeviceConfig::single_qubit(2.0, 1.4, 1.0);
    for theta in [-PI / 2.0, PI / 3.0] {
        let schedule = synthesize_resonant_pulse(&device, theta, 0.03).unwrap();
        let r = evolve(&schedule, None).unwrap();
        let u_rot = rotating_frame(&r.final_unitary, &zeeman(&device), schedule.duration()).unwrap();
        let logical = logical_qubit_basis(2, (1, 2)).unwrap().restrict(&u_rot).unwrap();
        let target = expm_hermitian(&half_pauli_x(), theta).unwrap();
        let f = compare_up_to_global_phase(&target, &logical).unwrap().fidelity;
        assert!(f > 0.999, "θ = {theta}: fidelity {f}");
    }
}

#[test]
fn echo_without_idle_is_the_pulse_layer() {
    let device = DeviceConfig::demo();
    let echo = qubit_echo(&device, 0.0).unwrap();
    assert_eq!(echo.modulated_segment_count(), 1);
    assert!(echo
        .segments()
        .iter()
        .all(|s| s.is_modulated() || s.is_free_evolution()));
    let basis = logical_product_basis(4, &[(1, 2), (3, 4)]).unwrap();
    let r = basis.restrict(&evolve(&echo, None).unwrap().final_unitary).unwrap();
    let x = expm_hermitian(&half_pauli_x(), PI).unwrap();
    let xx = spinpair_core::linalg::kron(&x, &x);
    assert!(compare_up_to_global_phase(&xx, &r).unwrap().fidelity > 0.99);
}

#[test]
fn echo_on_nominal_device_is_x_layer_in_lab_frame() {
    let device = DeviceConfig::demo();
    let echo = qubit_echo(&device, 500.0).unwrap();
    let basis = logical_product_basis(4, &[(1, 2), (3, 4)]).unwrap();
    let r = basis.restrict(&evolve(&echo, None).unwrap().final_unitary).unwrap();
    let x = expm_hermitian(&half_pauli_x(), PI).unwrap();
    let xx = spinpair_core::linalg::kron(&x, &x);
    assert!(compare_up_to_global_phase(&xx, &r).unwrap().fidelity > 0.99);
}

#[test]
fn schedules_reject_unknown_bonds_and_bad_durations() {
    let device = DeviceConfig::demo();
    assert!(PulseSchedule::new(device.clone(), vec![PulseSegment::exchange(&[(1, 3)], 1.0, 1.0)]).is_err());
    assert!(PulseSchedule::new(device.clone(), vec![PulseSegment::idle(0.0)]).is_err());
    assert!(PulseSchedule::new(device, vec![PulseSegment::idle(f64::NAN)]).is_err());
}
