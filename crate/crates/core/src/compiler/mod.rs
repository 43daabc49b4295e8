//! Logical circuits, their lowering to pulse schedules, lab-unit timing, and
//! the schedule file format.

mod circuit;
mod lower;
mod schedule_io;
mod timing;

pub use circuit::{parse_angle, parse_circuit, LogicalCircuit, LogicalGate};
pub use lower::{lower, lower_with, CompileOptions, CompileStats, RyPolicy};
pub use schedule_io::{export_schedule, import_schedule, parse_schedule, BondDrive, ScheduleDocument, SegmentDoc};
pub use timing::{
    duration_x, duration_z, estimate_clock, ClockEstimate, TimingModel, UnitSystem, CLOCK_DISCREPANCY_THRESHOLD,
    COEFF_X_PS, COEFF_Z_PS, REFERENCE_CLOCK_GHZ,
};

use crate::dynamics::{evolve, PulseSchedule};
use crate::encoding::{consecutive_pairs_basis, leakage};
use crate::error::Result;
use crate::linalg::{compare_up_to_global_phase, wrap_angle, ComplexMatrix, C64};

/// Simulated schedule compared with a circuit's ideal logical unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct LoweringCheck {
    /// Up to global phase only.
    pub fidelity: f64,
    /// After removing the best-fit Z phase on each qubit (applied last).
    pub z_corrected_fidelity: f64,
    /// Fitted phase on `|1⟩` of each qubit, in `(−π, π]`.
    pub residual_local_z: Vec<f64>,
    pub leakage: f64,
    pub convergence_estimate: f64,
}

/// Fits `r ≈ e^{iα} · Z(φ) · ideal` with `Z(φ) = ⊗_q diag(1, e^{iφ_q})`.
pub fn fit_local_z(r: &ComplexMatrix, ideal: &ComplexMatrix, n_qubits: usize) -> Result<(f64, Vec<f64>)> {
    let m = r * &ideal.adjoint();
    let d = m.diagonal();
    let phases: Vec<f64> = (0..n_qubits)
        .map(|q| {
            let bit = 1 << (n_qubits - 1 - q);
            let s: C64 = (0..d.len())
                .filter(|k| k & bit != 0)
                .map(|k| d[k] * d[k ^ bit].conj())
                .sum();
            if s.norm() > 1e-14 {
                wrap_angle(s.arg())
            } else {
                0.0
            }
        })
        .collect();
    let z = ComplexMatrix::from_diagonal(
        &(0..d.len())
            .map(|k| {
                let phi: f64 = (0..n_qubits)
                    .filter(|q| k & (1 << (n_qubits - 1 - q)) != 0)
                    .map(|q| phases[q])
                    .sum();
                C64::from_polar(1.0, phi)
            })
            .collect::<Vec<_>>(),
    );
    let corrected = compare_up_to_global_phase(&(&z * ideal), r)?.fidelity;
    Ok((corrected, phases))
}

/// Simulates `schedule` and compares it on the logical product space with
/// `circuit` extended to every qubit of the device.
pub fn verify_lowering(circuit: &LogicalCircuit, schedule: &PulseSchedule) -> Result<LoweringCheck> {
    let device = schedule.device();
    let n = device.n_logical();
    let full = LogicalCircuit {
        n_logical: n,
        gates: circuit.gates.clone(),
    };
    let ideal = full.ideal_unitary()?;
    let result = evolve(schedule, None)?;
    let basis = consecutive_pairs_basis(device.n_spins())?;
    let r = basis.restrict(&result.final_unitary)?;
    let fidelity = compare_up_to_global_phase(&ideal, &r)?.fidelity;
    let (z_corrected_fidelity, residual_local_z) = fit_local_z(&r, &ideal, n)?;
    Ok(LoweringCheck {
        fidelity,
        z_corrected_fidelity: z_corrected_fidelity.max(fidelity),
        residual_local_z,
        leakage: leakage(&result.final_unitary, &basis)?,
        convergence_estimate: result.convergence_estimate,
    })
}
