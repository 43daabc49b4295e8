use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::encoding::{logical_qubit_basis, logical_z_coefficient};
use crate::error::{Error, Result};
use crate::linalg::{c64, expm_hermitian, wrap_angle, ComplexMatrix};
use crate::spin::{zeeman, DeviceConfig, SpinAxis};

use super::{evolve, Coupling, PulseSchedule, PulseSegment};

/// Drive-to-frequency ratio above which a warning is logged.
pub const RWA_WARN_RATIO: f64 = 0.05;
/// Drive-to-frequency ratio above which synthesis is refused.
pub const RWA_MAX_RATIO: f64 = 0.1;

const ANGLE_TOL: f64 = 1e-7;
const SECANT_ITERATIONS: usize = 40;

/// Logical level splitting `|(g_i − g_j)·B|` of qubit `q`.
pub fn qubit_frequency(device: &DeviceConfig, q: usize) -> Result<f64> {
    if q >= device.n_logical() {
        return Err(Error::InvalidDevice(format!("device has no logical qubit {q}")));
    }
    let c = logical_z_coefficient(device, q);
    if c == 0.0 {
        return Err(Error::DegenerateZeeman);
    }
    Ok(c.abs())
}

/// Rabi (resonance) frequency `Ω = |Δg·B|` of the first qubit.
pub fn rabi_frequency(device: &DeviceConfig) -> Result<f64> {
    qubit_frequency(device, 0)
}

/// `exp(+i·h0·t) · u`.
pub fn rotating_frame(u: &ComplexMatrix, h0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(&expm_hermitian(h0, -t)? * u)
}

/// Carrier phase at the pulse start that drives a rotation about `axis`, for
/// a qubit whose logical Z coefficient is `c_z`.
pub fn carrier_phase(c_z: f64, axis: SpinAxis) -> Result<f64> {
    match axis {
        SpinAxis::X => Ok(FRAC_PI_2),
        SpinAxis::Y => Ok(if c_z < 0.0 { 0.0 } else { PI }),
        SpinAxis::Z => Err(Error::InvalidSchedule(
            "resonant pulses rotate about X or Y only".into(),
        )),
    }
}

/// Signed rotation angle about `axis` of a 2×2 logical unitary, after
/// removing its global phase. `sign` picks the branch: the result lies in
/// `[0, 2π]` for positive `sign` and in `[−2π, 0]` otherwise.
pub fn logical_rotation_angle(u: &ComplexMatrix, axis: SpinAxis, sign: f64) -> f64 {
    let (u00, u01, u10, u11) = (u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1));
    let k = (u00 * u11 - u01 * u10).sqrt();
    let i = c64(0.0, 1.0);
    let (v00, v01, v10, v11) = (u00 / k, u01 / k, u10 / k, u11 / k);
    let mut c = ((v00 + v11) * 0.5).re;
    let mut s = match axis {
        SpinAxis::X => (i * (v01 + v10) * 0.5).re,
        SpinAxis::Y => ((v10 - v01) * 0.5).re,
        SpinAxis::Z => (i * (v00 - v11) * 0.5).re,
    };
    if s * sign < 0.0 {
        c = -c;
        s = -s;
    }
    2.0 * s.atan2(c)
}

/// One calibrated resonant drive on the intra-pair bond of a qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonantPulse {
    pub qubit: usize,
    pub axis: SpinAxis,
    /// Target angle in `(−π, π]`.
    pub angle: f64,
    pub amplitude: f64,
    pub omega: f64,
    /// Carrier phase relative to the pulse start.
    pub phase: f64,
    pub duration: f64,
}

impl ResonantPulse {
    /// Coupling for a pulse whose frame is anchored at absolute time `start`.
    pub fn coupling(&self, start: f64) -> Coupling {
        Coupling::Sinusoid {
            amplitude: self.amplitude,
            omega: self.omega,
            phase: (self.phase - self.omega * start).rem_euclid(TAU),
        }
    }
}

/// Requested rotation for [`simultaneous_pulse`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseRequest {
    pub qubit: usize,
    pub axis: SpinAxis,
    pub angle: f64,
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::InvalidSchedule(format!(
            "drive ratio must be positive, got {ratio}"
        )));
    }
    if ratio > RWA_MAX_RATIO {
        return Err(Error::RwaViolation { ratio });
    }
    if ratio > RWA_WARN_RATIO + 1e-12 {
        log::warn!("drive ratio {ratio:.3} exceeds {RWA_WARN_RATIO}; rotating-wave errors grow");
    }
    Ok(())
}

/// Rotating-frame logical angle produced by a pulse on a two-spin device.
fn measured_angle(sub: &DeviceConfig, pulse: &ResonantPulse, sign: f64) -> Result<f64> {
    let segment = PulseSegment::idle(pulse.duration).with_coupling((1, 2), pulse.coupling(0.0));
    let schedule = PulseSchedule::new(sub.clone(), vec![segment])?;
    let u = evolve(&schedule, None)?.final_unitary;
    let u_rot = rotating_frame(&u, &zeeman(sub), pulse.duration)?;
    let logical = logical_qubit_basis(2, (1, 2))?.restrict(&u_rot)?;
    Ok(logical_rotation_angle(&logical, pulse.axis, sign))
}

fn secant(mut f: impl FnMut(f64) -> Result<f64>, x0: f64, x1: f64, target: f64) -> Result<f64> {
    let (mut xa, mut xb) = (x0, x1);
    let mut fa = f(xa)? - target;
    let mut fb = f(xb)? - target;
    for _ in 0..SECANT_ITERATIONS {
        if fb.abs() < ANGLE_TOL {
            return Ok(xb);
        }
        if fb == fa {
            break;
        }
        let next = xb - fb * (xb - xa) / (fb - fa);
        xa = xb;
        fa = fb;
        xb = next;
        fb = f(xb)? - target;
    }
    if fb.abs() < ANGLE_TOL {
        return Ok(xb);
    }
    Err(Error::NonConvergence {
        steps: SECANT_ITERATIONS,
        estimate: fb.abs(),
    })
}

/// Calibrates a single resonant pulse on qubit `q` at drive ratio
/// `j_amp / Ω`. Returns `None` for a zero angle.
pub fn resonant_pulse(
    device: &DeviceConfig,
    q: usize,
    axis: SpinAxis,
    angle: f64,
    ratio: f64,
) -> Result<Option<ResonantPulse>> {
    check_ratio(ratio)?;
    let theta = wrap_angle(angle);
    if theta == 0.0 {
        return Ok(None);
    }
    let sub = device.qubit_subdevice(q)?;
    let c_z = logical_z_coefficient(&sub, 0);
    let omega = qubit_frequency(&sub, 0)?;
    let sign = theta.signum();
    let mut pulse = ResonantPulse {
        qubit: q,
        axis,
        angle: theta,
        amplitude: ratio * omega,
        omega,
        phase: carrier_phase(c_z, axis)? + if sign < 0.0 { PI } else { 0.0 },
        duration: 0.0,
    };
    let seed = theta.abs() / (pulse.amplitude / 2.0);
    pulse.duration = secant(
        |t| measured_angle(&sub, &ResonantPulse { duration: t, ..pulse }, sign),
        seed,
        seed * 1.01,
        theta,
    )?;
    Ok(Some(pulse))
}

/// Calibrates pulses on several qubits that run together for a common
/// duration: the longest pulse sets the duration and the others are
/// re-tuned in amplitude.
pub fn simultaneous_pulse(device: &DeviceConfig, requests: &[PulseRequest], ratio: f64) -> Result<Vec<ResonantPulse>> {
    let mut seen = std::collections::BTreeSet::new();
    if let Some(r) = requests.iter().find(|r| !seen.insert(r.qubit)) {
        return Err(Error::InvalidSchedule(format!("qubit {} requested twice", r.qubit)));
    }
    let mut pulses = Vec::new();
    for r in requests {
        if let Some(p) = resonant_pulse(device, r.qubit, r.axis, r.angle, ratio)? {
            pulses.push(p);
        }
    }
    let duration = pulses.iter().map(|p| p.duration).fold(0.0, f64::max);
    for p in &mut pulses {
        if duration - p.duration <= 1e-12 * duration {
            continue;
        }
        let sub = device.qubit_subdevice(p.qubit)?;
        let base = ResonantPulse { duration, ..*p };
        let seed = p.amplitude * p.duration / duration;
        let sign = p.angle.signum();
        let amplitude = secant(
            |a| measured_angle(&sub, &ResonantPulse { amplitude: a, ..base }, sign),
            seed,
            seed * 1.01,
            p.angle,
        )?;
        *p = ResonantPulse { amplitude, ..base };
    }
    Ok(pulses)
}

/// Segment running `pulses` together, each phased for a frame anchored at `start`.
pub fn pulse_segment(device: &DeviceConfig, pulses: &[ResonantPulse], start: f64) -> PulseSegment {
    let duration = pulses.iter().map(|p| p.duration).fold(0.0, f64::max);
    pulses.iter().fold(PulseSegment::idle(duration), |seg, p| {
        seg.with_coupling(device.pair(p.qubit), p.coupling(start))
    })
}

/// Shared frequency of the given qubits, if they all agree.
pub fn common_frequency(device: &DeviceConfig, qubits: &[usize]) -> Result<Option<f64>> {
    let freqs = qubits
        .iter()
        .map(|&q| qubit_frequency(device, q))
        .collect::<Result<Vec<_>>>()?;
    let Some(&first) = freqs.first() else {
        return Ok(None);
    };
    Ok(freqs
        .iter()
        .all(|f| (f - first).abs() <= 1e-12 * first)
        .then_some(first))
}

/// Idle time completing `duration` to a whole number of periods at `omega`.
pub fn larmor_pad(omega: f64, duration: f64) -> f64 {
    let period = TAU / omega;
    let pad = (duration / period).ceil() * period - duration;
    if pad < 1e-9 * period || period - pad < 1e-9 * period {
        0.0
    } else {
        pad
    }
}

/// A single X or Y pulse on the first qubit with absolute drive amplitude
/// `j_amp`, starting at time 0.
pub fn synthesize_resonant_pulse(device: &DeviceConfig, target_angle: f64, j_amp: f64) -> Result<PulseSchedule> {
    let omega = rabi_frequency(device)?;
    match resonant_pulse(device, 0, SpinAxis::X, target_angle, j_amp / omega)? {
        Some(p) => PulseSchedule::new(device.clone(), vec![pulse_segment(device, &[p], 0.0)]),
        None => Ok(PulseSchedule::empty(device.clone())),
    }
}

/// Echo with the default drive ratio.
pub fn qubit_echo(device: &DeviceConfig, idle_time: f64) -> Result<PulseSchedule> {
    qubit_echo_with(device, idle_time, RWA_WARN_RATIO)
}

/// `idle(t/2)`, simultaneous X π pulses on every qubit, `idle(t/2)`. When all
/// qubits share one frequency, an idle pad after the pulses completes a whole
/// number of Larmor periods so the lab-frame result is the X layer itself.
pub fn qubit_echo_with(device: &DeviceConfig, idle_time: f64, ratio: f64) -> Result<PulseSchedule> {
    if !(idle_time.is_finite() && idle_time >= 0.0) {
        return Err(Error::InvalidSchedule(format!(
            "idle time must be non-negative, got {idle_time}"
        )));
    }
    let qubits: Vec<usize> = (0..device.n_logical()).collect();
    if qubits.is_empty() {
        return Err(Error::InvalidDevice("echo needs at least one logical qubit".into()));
    }
    let requests: Vec<PulseRequest> = qubits
        .iter()
        .map(|&qubit| PulseRequest {
            qubit,
            axis: SpinAxis::X,
            angle: PI,
        })
        .collect();
    let pulses = simultaneous_pulse(device, &requests, ratio)?;
    let half = idle_time / 2.0;
    let mut segments = Vec::new();
    if half > 0.0 {
        segments.push(PulseSegment::idle(half));
    }
    let pulse = pulse_segment(device, &pulses, half);
    let pad = common_frequency(device, &qubits)?
        .map(|omega| larmor_pad(omega, pulse.duration))
        .unwrap_or(0.0);
    segments.push(pulse);
    if pad > 0.0 {
        segments.push(PulseSegment::idle(pad));
    }
    if half > 0.0 {
        segments.push(PulseSegment::idle(half));
    }
    PulseSchedule::new(device.clone(), segments)
}
