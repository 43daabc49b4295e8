//! Simulation and pulse compilation for exchange-only encoded spin qubits.
//!
//! Each logical qubit is a pair of spin-1/2 particles with different
//! g-factors. Logical X comes from the intra-pair exchange, logical Z from
//! the Zeeman difference, and two-qubit gates from exchange across pairs.

pub mod compiler;
pub mod dynamics;
pub mod encoding;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod spin;

pub use compiler::{
    duration_x, duration_z, estimate_clock, lower, lower_with, parse_circuit, CompileOptions, CompileStats,
    LogicalCircuit, LogicalGate, RyPolicy, TimingModel, UnitSystem,
};
pub use dynamics::{evolve, evolve_with, Coupling, EvolveOptions, PulseSchedule, PulseSegment, SimulationResult};
pub use encoding::{dfs_basis, leakage, logical_product_basis, logical_qubit_basis, SubspaceBasis};
pub use error::{Error, Result};
pub use gates::{
    build_cnot_from_nand, build_nand_encoded, build_nand_physical, build_u0, calibration, verify_controlled_phase,
    Calibration, ControlledPhaseReport, GateSequence, GateStep,
};
pub use linalg::{c64, compare_up_to_global_phase, expm_hermitian, ComplexMatrix, EquivalenceReport, C64};
pub use spin::{heisenberg, spin_operator, zeeman, Bond, DeviceConfig, Layout, SpinAxis};
