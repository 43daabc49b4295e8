//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use spinpair_core::dynamics::{rabi_frequency, synthesize_resonant_pulse};
use spinpair_core::{heisenberg, parse_circuit, zeeman, ComplexMatrix, DeviceConfig, LogicalCircuit, PulseSchedule};

/// Zeeman plus one exchange bond on the demo device (16×16).
pub fn demo_hamiltonian() -> ComplexMatrix {
    let device = DeviceConfig::demo();
    &zeeman(&device) + &heisenberg(4, 2, 3).expect("bond (2, 3) exists").scale_real(0.7)
}

/// Resonant X π pulse on one demo qubit at drive ratio `ratio`.
pub fn pi_pulse(ratio: f64) -> PulseSchedule {
    let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
    let omega = rabi_frequency(&device).expect("demo qubit has a splitting");
    synthesize_resonant_pulse(&device, PI, ratio * omega).expect("ratio within the drive limit")
}

pub fn nand_circuit() -> LogicalCircuit {
    parse_circuit("qubits 2\nnand q0 q1\n").expect("valid circuit")
}

pub fn mixed_circuit() -> LogicalCircuit {
    parse_circuit("qubits 2\nrx q0 pi/2\nry q1 0.3\ncnot q0 q1\nrz q1 pi/4\n").expect("valid circuit")
}
