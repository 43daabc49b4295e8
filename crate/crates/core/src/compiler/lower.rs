use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::circuit::{LogicalCircuit, LogicalGate};
use super::timing::{TimingModel, UnitSystem};
use crate::dynamics::{
    common_frequency, larmor_pad, pulse_segment, resonant_pulse, simultaneous_pulse, PulseRequest, PulseSchedule,
    PulseSegment, RWA_WARN_RATIO,
};
use crate::encoding::logical_z_coefficient;
use crate::error::{Error, Result};
use crate::gates::{calibration, u0_time_for, Calibration, GateSequence, GateStep};
use crate::spin::{DeviceConfig, SpinAxis};

/// How RY is realized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RyPolicy {
    /// `RZ(−π/2)`, `RX(θ)`, `RZ(π/2)` in time order.
    #[default]
    Composite,
    /// One resonant pulse with a Y carrier phase, padded to whole Larmor periods.
    Resonant,
}

impl std::str::FromStr for RyPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "composite" => Ok(RyPolicy::Composite),
            "resonant" => Ok(RyPolicy::Resonant),
            other => Err(Error::Config(format!("unknown RY policy {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompileOptions {
    pub ry_policy: RyPolicy,
    /// Resonant drive amplitude relative to the qubit frequency.
    pub drive_ratio: f64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            ry_policy: RyPolicy::Composite,
            drive_ratio: RWA_WARN_RATIO,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CompileStats {
    pub exchange_op_count: usize,
    pub z_evolution_count: usize,
    pub resonant_pulse_count: usize,
    pub total_duration_ps: f64,
}

impl CompileStats {
    pub fn of(schedule: &PulseSchedule, units: &UnitSystem) -> Self {
        Self {
            exchange_op_count: schedule.exchange_segment_count(),
            z_evolution_count: schedule.free_evolution_count(),
            resonant_pulse_count: schedule.modulated_segment_count(),
            total_duration_ps: units.to_ps(schedule.duration()),
        }
    }
}

/// Lowers with default options.
pub fn lower(
    circuit: &LogicalCircuit,
    device: &DeviceConfig,
    timing: &TimingModel,
) -> Result<(PulseSchedule, CompileStats)> {
    lower_with(circuit, device, timing, &CompileOptions::default())
}

/// Turns a circuit into a lab-frame schedule.
///
/// The physics (g-factors, field) comes from `device`; `timing` supplies the
/// exchange strength used for every constant exchange segment and the unit
/// conversion. Exchange segments run with the field switched off. Qubits not
/// addressed by a gate have any free-evolution phase refocused by X π
/// exchange pulses.
pub fn lower_with(
    circuit: &LogicalCircuit,
    device: &DeviceConfig,
    timing: &TimingModel,
    options: &CompileOptions,
) -> Result<(PulseSchedule, CompileStats)> {
    if circuit.n_logical > device.n_logical() {
        return Err(Error::Lowering(format!(
            "circuit uses {} qubits but the device holds {}",
            circuit.n_logical,
            device.n_logical()
        )));
    }
    let units = timing.units();
    let mut lowerer = Lowerer {
        device,
        cal: calibration(),
        options,
        j_mev: timing.j_ex_mev,
        j: units.coupling_from_mev(timing.j_ex_mev),
        segments: Vec::new(),
        clock: 0.0,
    };
    if !circuit.gates.is_empty() && !(timing.j_ex_mev > 0.0 && timing.j_ex_mev.is_finite()) {
        return Err(Error::InvalidTiming(format!(
            "exchange must be positive, got {} meV",
            timing.j_ex_mev
        )));
    }
    for gate in &circuit.gates {
        lowerer.gate(gate)?;
    }
    let schedule = PulseSchedule::new(device.clone(), lowerer.segments)?;
    let stats = CompileStats::of(&schedule, &units);
    Ok((schedule, stats))
}

struct Lowerer<'a> {
    device: &'a DeviceConfig,
    cal: &'a Calibration,
    options: &'a CompileOptions,
    j_mev: f64,
    j: f64,
    segments: Vec<PulseSegment>,
    clock: f64,
}

impl Lowerer<'_> {
    fn push(&mut self, segment: PulseSegment) {
        if segment.duration > 0.0 {
            self.clock += segment.duration;
            self.segments.push(segment);
        }
    }

    fn c_z(&self, q: usize) -> Result<f64> {
        let c = logical_z_coefficient(self.device, q);
        if c == 0.0 {
            return Err(Error::DegenerateZeeman);
        }
        Ok(c)
    }

    fn all_qubits(&self) -> Vec<usize> {
        (0..self.device.n_logical()).collect()
    }

    fn check_bond(&self, bond: (usize, usize)) -> Result<()> {
        let b = self
            .device
            .bond(bond.0, bond.1)
            .ok_or_else(|| Error::Lowering(format!("device has no bond {bond:?}")))?;
        if self.j_mev > b.j_max_mev * (1.0 + 1e-12) {
            return Err(Error::Lowering(format!(
                "exchange {} meV exceeds the {} meV limit of bond {bond:?}",
                self.j_mev, b.j_max_mev
            )));
        }
        Ok(())
    }

    /// Exchange of angle `theta` on each bond at once.
    fn exchange(&mut self, bonds: &[(usize, usize)], theta: f64) -> Result<()> {
        for &b in bonds {
            self.check_bond(b)?;
        }
        let angle = (self.cal.exchange_sign * theta).rem_euclid(TAU);
        if bonds.is_empty() || angle < 1e-15 || TAU - angle < 1e-15 {
            return Ok(());
        }
        self.push(PulseSegment::exchange(bonds, self.j, angle / self.j));
        Ok(())
    }

    /// Free evolution for `t`, refocusing every qubit in `protect` whose
    /// phase over `t` would not be trivial.
    fn free_evolution(&mut self, t: f64, protect: &[usize]) -> Result<()> {
        if t <= 0.0 {
            return Ok(());
        }
        let mut spectators = Vec::new();
        for &q in protect {
            let phase = (self.c_z(q).unwrap_or(0.0) * t).rem_euclid(TAU);
            if phase > 1e-9 && TAU - phase > 1e-9 {
                spectators.push(self.device.pair(q));
            }
        }
        if spectators.is_empty() {
            self.push(PulseSegment::idle(t));
        } else {
            self.push(PulseSegment::idle(t / 2.0));
            self.exchange(&spectators, PI)?;
            self.push(PulseSegment::idle(t / 2.0));
            self.exchange(&spectators, PI)?;
        }
        Ok(())
    }

    fn others(&self, qubits: &[usize]) -> Vec<usize> {
        self.all_qubits().into_iter().filter(|q| !qubits.contains(q)).collect()
    }

    /// Free-evolution time giving `RZ(θ)` on `q`.
    fn rz_time(&self, q: usize, theta: f64) -> Result<f64> {
        let c = self.c_z(q)?;
        Ok((theta / c).rem_euclid(TAU / c.abs()))
    }

    fn rx(&mut self, q: usize, theta: f64) -> Result<()> {
        self.exchange(&[self.device.pair(q)], theta)
    }

    fn rz(&mut self, q: usize, theta: f64) -> Result<()> {
        let t = self.rz_time(q, theta)?;
        let others = self.others(&[q]);
        self.free_evolution(t, &others)
    }

    fn ry(&mut self, q: usize, theta: f64) -> Result<()> {
        match self.options.ry_policy {
            RyPolicy::Composite => {
                let t1 = self.rz_time(q, -FRAC_PI_2)?;
                let t2 = self.rz_time(q, FRAC_PI_2)?;
                let protect: Vec<usize> = self
                    .others(&[q])
                    .into_iter()
                    .filter(|&s| {
                        let phase = (self.c_z(s).unwrap_or(0.0) * (t1 + t2)).rem_euclid(TAU);
                        phase > 1e-9 && TAU - phase > 1e-9
                    })
                    .collect();
                self.free_evolution(t1, &protect)?;
                self.rx(q, theta)?;
                self.free_evolution(t2, &protect)
            }
            RyPolicy::Resonant => {
                let omega = common_frequency(self.device, &self.all_qubits())?
                    .ok_or_else(|| Error::Lowering("resonant RY needs every qubit at the same frequency".into()))?;
                let Some(pulse) = resonant_pulse(self.device, q, SpinAxis::Y, theta, self.options.drive_ratio)? else {
                    return Ok(());
                };
                let segment = pulse_segment(self.device, &[pulse], self.clock);
                let pad = larmor_pad(omega, segment.duration);
                self.push(segment);
                self.push(PulseSegment::idle(pad));
                Ok(())
            }
        }
    }

    /// Inter-qubit bond joining a spin of `a` to a spin of `b` with a
    /// different g-factor slot, preferring the layout's own bond.
    fn inter_qubit_bond(&self, a: usize, b: usize) -> Result<(usize, usize)> {
        let (lo, hi) = (a.min(b), a.max(b));
        let preferred = self.device.layout().inter_qubit_bond(lo, hi);
        if self.device.has_bond(preferred.0, preferred.1) {
            return Ok(preferred);
        }
        let mut same_slot = false;
        for bond in self.device.bonds() {
            let (Some((qa, sa)), Some((qb, sb))) =
                (self.device.qubit_of_spin(bond.i), self.device.qubit_of_spin(bond.j))
            else {
                continue;
            };
            if (qa, qb) == (lo, hi) || (qa, qb) == (hi, lo) {
                if sa != sb {
                    return Ok((bond.i, bond.j));
                }
                same_slot = true;
            }
        }
        Err(Error::Lowering(if same_slot {
            format!("qubits q{a} and q{b} are coupled only between spins with equal g-factors")
        } else {
            format!("qubits q{a} and q{b} are not adjacent: no inter-qubit bond")
        }))
    }

    fn nand(&mut self, a: usize, b: usize) -> Result<()> {
        let bond = self.inter_qubit_bond(a, b)?;
        let g = self.device.g_factors();
        let (pa, pb) = (self.device.pair(a), self.device.pair(b));
        if (g[pa.0 - 1] - g[pb.0 - 1]).abs() > 1e-12 || (g[pa.1 - 1] - g[pb.1 - 1]).abs() > 1e-12 {
            return Err(Error::Lowering(format!("nand needs equal g-factors on q{a} and q{b}")));
        }
        let c = self.c_z(a)?;
        let period = TAU / c.abs();
        let spectators = self.others(&[a, b]);
        for step in GateSequence::encoded_nand(bond).steps {
            match step {
                GateStep::Exchange { bond, angle } => self.exchange(&[bond], angle)?,
                GateStep::FreeEvolution { angle } => {
                    let t = u0_time_for(self.device, a, angle, self.cal)?.rem_euclid(period);
                    self.free_evolution(t, &spectators)?;
                }
                GateStep::Rotation { .. } => unreachable!("encoded sequence has no single-spin rotations"),
            }
        }
        Ok(())
    }

    fn echo(&mut self, idle: f64) -> Result<()> {
        let qubits = self.all_qubits();
        let omega = common_frequency(self.device, &qubits)?
            .ok_or_else(|| Error::Lowering("echo needs every qubit at the same frequency".into()))?;
        let requests: Vec<PulseRequest> = qubits
            .iter()
            .map(|&qubit| PulseRequest {
                qubit,
                axis: SpinAxis::X,
                angle: PI,
            })
            .collect();
        let pulses = simultaneous_pulse(self.device, &requests, self.options.drive_ratio)?;
        self.push(PulseSegment::idle(idle / 2.0));
        let segment = pulse_segment(self.device, &pulses, self.clock);
        let pad = larmor_pad(omega, segment.duration);
        self.push(segment);
        self.push(PulseSegment::idle(pad));
        self.push(PulseSegment::idle(idle / 2.0));
        Ok(())
    }

    fn gate(&mut self, gate: &LogicalGate) -> Result<()> {
        match *gate {
            LogicalGate::Rx(q, t) => self.rx(q, t),
            LogicalGate::Ry(q, t) => self.ry(q, t),
            LogicalGate::Rz(q, t) => self.rz(q, t),
            LogicalGate::Nand(a, b) => self.nand(a, b),
            LogicalGate::Cnot { control, target } => {
                let s = self.cal.basis_change_sign;
                self.ry(target, s * FRAC_PI_2)?;
                self.nand(control, target)?;
                self.ry(target, -s * FRAC_PI_2)
            }
            LogicalGate::Echo(t) => self.echo(t),
        }
    }
}
