//! Time-dependent evolution of a spin register under switched and modulated
//! exchange.
//!
//! Times, energies and frequencies are in natural units (`ħ = μ_B = 1`, field
//! in Tesla). A segment's Hamiltonian is
//! `H(t) = [zeeman] + Σ_b J_b(t) S_i·S_j`; modulated couplings are
//! `J(t) = A sin(ω t + φ₀)` with `t` the absolute schedule time.

mod evolve;
mod resonance;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::spin::DeviceConfig;

pub use evolve::{evolve, evolve_with, EvolveOptions, Integrator, SimulationResult};
pub use resonance::{
    carrier_phase, common_frequency, larmor_pad, logical_rotation_angle, pulse_segment, qubit_echo, qubit_echo_with,
    qubit_frequency, rabi_frequency, resonant_pulse, rotating_frame, simultaneous_pulse, synthesize_resonant_pulse,
    PulseRequest, ResonantPulse, RWA_MAX_RATIO, RWA_WARN_RATIO,
};

/// Time dependence of one exchange bond during a segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coupling {
    Constant(f64),
    /// `amplitude · sin(omega · t + phase)` with absolute time `t`.
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
}

impl Coupling {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Coupling::Constant(j) => j,
            Coupling::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude * (omega * t + phase).sin(),
        }
    }

    pub fn is_modulated(&self) -> bool {
        matches!(self, Coupling::Sinusoid { .. })
    }

    fn is_finite(&self) -> bool {
        match *self {
            Coupling::Constant(j) => j.is_finite(),
            Coupling::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude.is_finite() && omega.is_finite() && phase.is_finite(),
        }
    }
}

/// Fixed set of couplings held for `duration`.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSegment {
    pub duration: f64,
    /// Keyed by bond `(i, j)` with `i < j`.
    pub couplings: BTreeMap<(usize, usize), Coupling>,
    pub zeeman: bool,
}

impl PulseSegment {
    /// Free Zeeman evolution.
    pub fn idle(duration: f64) -> Self {
        Self {
            duration,
            couplings: BTreeMap::new(),
            zeeman: true,
        }
    }

    /// Constant exchange on the given bonds with the field switched off.
    pub fn exchange(bonds: &[(usize, usize)], j: f64, duration: f64) -> Self {
        Self {
            duration,
            couplings: bonds.iter().map(|&b| (b, Coupling::Constant(j))).collect(),
            zeeman: false,
        }
    }

    pub fn with_coupling(mut self, bond: (usize, usize), coupling: Coupling) -> Self {
        self.couplings.insert(bond, coupling);
        self
    }

    pub fn is_modulated(&self) -> bool {
        self.couplings.values().any(Coupling::is_modulated)
    }

    /// Holds at least one constant nonzero exchange coupling.
    pub fn is_exchange(&self) -> bool {
        self.couplings
            .values()
            .any(|c| matches!(c, Coupling::Constant(j) if *j != 0.0))
    }

    /// Field on, no exchange.
    pub fn is_free_evolution(&self) -> bool {
        self.zeeman
            && self
                .couplings
                .values()
                .all(|c| matches!(c, Coupling::Constant(j) if *j == 0.0))
    }
}

/// Segments applied in order on a device.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    device: DeviceConfig,
    segments: Vec<PulseSegment>,
}

impl PulseSchedule {
    pub fn new(device: DeviceConfig, segments: Vec<PulseSegment>) -> Result<Self> {
        let schedule = Self { device, segments };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn empty(device: DeviceConfig) -> Self {
        Self {
            device,
            segments: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        for (k, seg) in self.segments.iter().enumerate() {
            if !(seg.duration.is_finite() && seg.duration > 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {k} has non-positive duration {}",
                    seg.duration
                )));
            }
            for (&(i, j), coupling) in &seg.couplings {
                if i >= j || !self.device.has_bond(i, j) {
                    return Err(Error::InvalidSchedule(format!(
                        "segment {k} drives bond ({i}, {j}), which the device does not have"
                    )));
                }
                if !coupling.is_finite() {
                    return Err(Error::InvalidSchedule(format!(
                        "segment {k} has a non-finite coupling on bond ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn device(&self) -> &DeviceConfig {
        &self.device
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Same segments on another device with the same bonds (e.g. with disorder).
    pub fn with_device(&self, device: DeviceConfig) -> Result<Self> {
        if device.n_spins() != self.device.n_spins() {
            return Err(Error::DimensionMismatch {
                expected: self.device.n_spins(),
                found: device.n_spins(),
            });
        }
        Self::new(device, self.segments.clone())
    }

    pub fn push(&mut self, segment: PulseSegment) -> Result<()> {
        self.segments.push(segment);
        if let Err(e) = self.validate() {
            self.segments.pop();
            return Err(e);
        }
        Ok(())
    }

    /// Appends another schedule's segments. Modulation phases are absolute,
    /// so `other` must already be phased for its new start time.
    pub fn extend(&mut self, other: &PulseSchedule) -> Result<()> {
        if other.device != self.device {
            return Err(Error::InvalidSchedule(
                "cannot join schedules for different devices".into(),
            ));
        }
        self.segments.extend(other.segments.iter().cloned());
        Ok(())
    }

    pub fn exchange_segment_count(&self) -> usize {
        self.segments.iter().filter(|s| s.is_exchange()).count()
    }

    pub fn free_evolution_count(&self) -> usize {
        self.segments.iter().filter(|s| s.is_free_evolution()).count()
    }

    pub fn modulated_segment_count(&self) -> usize {
        self.segments.iter().filter(|s| s.is_modulated()).count()
    }
}
