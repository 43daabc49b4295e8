use std::collections::BTreeMap;

use crate::encoding::{leakage, SubspaceBasis};
use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, ComplexMatrix, HermitianEigen};
use crate::spin::{heisenberg, zeeman};

use super::{PulseSchedule, PulseSegment};

/// Stepping rule for modulated segments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Integrator {
    /// One exponential per step at the step midpoint (second order).
    Midpoint,
    /// Two exponentials per step at the Gauss–Legendre nodes (fourth order,
    /// commutator free).
    #[default]
    Magnus4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub integrator: Integrator,
    /// Accept a modulated segment once halving the step changes it by less than this.
    pub tolerance: f64,
    /// Largest step count tried on one segment.
    pub max_steps: usize,
    /// Leakage samples recorded per segment.
    pub samples_per_segment: usize,
    /// Use exactly this many steps per modulated segment, without halving.
    pub fixed_steps: Option<usize>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::Magnus4,
            tolerance: 1e-8,
            max_steps: 1 << 20,
            samples_per_segment: 16,
            fixed_steps: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimulationResult {
    pub final_unitary: ComplexMatrix,
    /// `(time, leakage)` samples; empty without a basis.
    pub leakage_trace: Vec<(f64, f64)>,
    pub step_count: usize,
    /// Sum over modulated segments of the last step-halving change (operator norm).
    pub convergence_estimate: f64,
}

/// Propagates `schedule` from the identity with default options.
pub fn evolve(schedule: &PulseSchedule, basis: Option<&SubspaceBasis>) -> Result<SimulationResult> {
    evolve_with(schedule, basis, &EvolveOptions::default())
}

pub fn evolve_with(
    schedule: &PulseSchedule,
    basis: Option<&SubspaceBasis>,
    options: &EvolveOptions,
) -> Result<SimulationResult> {
    let device = schedule.device();
    let n = device.n_spins();
    if let Some(b) = basis {
        if b.n_spins() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.n_spins(),
            });
        }
    }
    let ctx = Generators::new(schedule)?;
    let mut u = ComplexMatrix::identity(1 << n);
    let mut trace = Vec::new();
    if let Some(b) = basis {
        trace.push((0.0, leakage(&u, b)?));
    }
    let mut t = 0.0;
    let mut step_count = 0;
    let mut convergence_estimate = 0.0;
    for segment in schedule.segments() {
        let mut sampler = Sampler::new(basis, options.samples_per_segment);
        if segment.is_modulated() {
            let run = ctx.modulated(segment, t, &u, options, &mut sampler)?;
            u = run.unitary;
            step_count += run.steps;
            convergence_estimate += run.change;
        } else {
            let h = ctx.hamiltonian(segment, t);
            let eig = HermitianEigen::new(&h)?;
            if sampler.active() {
                let count = options.samples_per_segment.max(1);
                for k in 1..count {
                    let dt = segment.duration * k as f64 / count as f64;
                    sampler.record(t + dt, &(&eig.propagator(dt) * &u))?;
                }
            }
            u = &eig.propagator(segment.duration) * &u;
            step_count += 1;
        }
        t += segment.duration;
        trace.extend(sampler.samples);
        if let Some(b) = basis {
            trace.push((t, leakage(&u, b)?));
        }
    }
    Ok(SimulationResult {
        final_unitary: u,
        leakage_trace: trace,
        step_count,
        convergence_estimate,
    })
}

/// Static pieces of the Hamiltonian for every bond the schedule touches.
pub(super) struct Generators {
    zeeman: ComplexMatrix,
    bonds: BTreeMap<(usize, usize), ComplexMatrix>,
}

pub(super) struct ModulatedRun {
    pub unitary: ComplexMatrix,
    pub steps: usize,
    pub change: f64,
}

impl Generators {
    pub(super) fn new(schedule: &PulseSchedule) -> Result<Self> {
        let device = schedule.device();
        let n = device.n_spins();
        let mut bonds = BTreeMap::new();
        for segment in schedule.segments() {
            for &(i, j) in segment.couplings.keys() {
                if let std::collections::btree_map::Entry::Vacant(slot) = bonds.entry((i, j)) {
                    slot.insert(heisenberg(n, i, j)?);
                }
            }
        }
        Ok(Self {
            zeeman: zeeman(device),
            bonds,
        })
    }

    pub(super) fn hamiltonian(&self, segment: &PulseSegment, t: f64) -> ComplexMatrix {
        let mut h = if segment.zeeman {
            self.zeeman.clone()
        } else {
            ComplexMatrix::zeros(self.zeeman.dim())
        };
        for (bond, coupling) in &segment.couplings {
            let j = coupling.value(t);
            if j != 0.0 {
                h = &h + &self.bonds[bond].scale_real(j);
            }
        }
        h
    }

    fn rate(&self, segment: &PulseSegment) -> f64 {
        let diag: Vec<f64> = self.zeeman.diagonal().iter().map(|z| z.re).collect();
        let spread = if segment.zeeman {
            diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - diag.iter().cloned().fold(f64::INFINITY, f64::min)
        } else {
            0.0
        };
        segment.couplings.values().fold(spread, |acc, c| match *c {
            super::Coupling::Constant(j) => acc + j.abs(),
            super::Coupling::Sinusoid { amplitude, omega, .. } => acc + amplitude.abs() + omega.abs(),
        })
    }

    fn step(&self, segment: &PulseSegment, t: f64, dt: f64, integrator: Integrator) -> Result<ComplexMatrix> {
        match integrator {
            Integrator::Midpoint => expm_hermitian(&self.hamiltonian(segment, t + 0.5 * dt), dt),
            Integrator::Magnus4 => {
                let r = 3f64.sqrt() / 6.0;
                let (a, b) = (0.25 - r, 0.25 + r);
                let h1 = self.hamiltonian(segment, t + (0.5 - r) * dt);
                let h2 = self.hamiltonian(segment, t + (0.5 + r) * dt);
                let first = expm_hermitian(&(&h1.scale_real(b) + &h2.scale_real(a)), dt)?;
                let second = expm_hermitian(&(&h1.scale_real(a) + &h2.scale_real(b)), dt)?;
                Ok(&second * &first)
            }
        }
    }

    fn fixed_steps(
        &self,
        segment: &PulseSegment,
        t0: f64,
        start: &ComplexMatrix,
        steps: usize,
        integrator: Integrator,
        sampler: &mut Sampler,
    ) -> Result<ComplexMatrix> {
        let dt = segment.duration / steps as f64;
        let every = (steps / sampler.count.max(1)).max(1);
        sampler.samples.clear();
        let mut u = start.clone();
        for k in 0..steps {
            let t = t0 + k as f64 * dt;
            u = &self.step(segment, t, dt, integrator)? * &u;
            if sampler.active() && (k + 1) % every == 0 && k + 1 < steps {
                sampler.record(t + dt, &u)?;
            }
        }
        Ok(u)
    }

    /// Integrates a modulated segment, halving the step until the result settles.
    pub(super) fn modulated(
        &self,
        segment: &PulseSegment,
        t0: f64,
        start: &ComplexMatrix,
        options: &EvolveOptions,
        sampler: &mut Sampler,
    ) -> Result<ModulatedRun> {
        if let Some(steps) = options.fixed_steps {
            let steps = steps.max(1);
            let unitary = self.fixed_steps(segment, t0, start, steps, options.integrator, sampler)?;
            return Ok(ModulatedRun {
                unitary,
                steps,
                change: 0.0,
            });
        }
        let initial = (segment.duration * self.rate(segment) / 0.5).ceil() as usize;
        let mut steps = initial.clamp(8, options.max_steps.max(1));
        let mut previous = self.fixed_steps(segment, t0, start, steps, options.integrator, sampler)?;
        loop {
            if steps * 2 > options.max_steps {
                return Err(Error::NonConvergence {
                    steps,
                    estimate: f64::NAN,
                });
            }
            steps *= 2;
            let current = self.fixed_steps(segment, t0, start, steps, options.integrator, sampler)?;
            let change = (&current - &previous).operator_norm();
            if change < options.tolerance {
                return Ok(ModulatedRun {
                    unitary: current,
                    steps,
                    change,
                });
            }
            if steps * 2 > options.max_steps {
                return Err(Error::NonConvergence {
                    steps,
                    estimate: change,
                });
            }
            previous = current;
        }
    }
}

pub(super) struct Sampler<'a> {
    basis: Option<&'a SubspaceBasis>,
    count: usize,
    samples: Vec<(f64, f64)>,
}

impl<'a> Sampler<'a> {
    pub(super) fn new(basis: Option<&'a SubspaceBasis>, count: usize) -> Self {
        Self {
            basis,
            count,
            samples: Vec::new(),
        }
    }

    fn active(&self) -> bool {
        self.basis.is_some() && self.count > 1
    }

    fn record(&mut self, t: f64, u: &ComplexMatrix) -> Result<()> {
        if let Some(b) = self.basis {
            self.samples.push((t, leakage(u, b)?));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Coupling, PulseSegment};
    use crate::encoding::logical_qubit_basis;
    use crate::spin::{exchange_gate, DeviceConfig};

    #[test]
    fn constant_segment_is_exact_exchange() {
        let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
        let theta = 1.234;
        let schedule = PulseSchedule::new(device, vec![PulseSegment::exchange(&[(1, 2)], 0.5, theta / 0.5)]).unwrap();
        let r = evolve(&schedule, None).unwrap();
        let expected = exchange_gate(2, 1, 2, theta).unwrap();
        assert!(r.final_unitary.max_abs_diff(&expected) < 1e-10);
        assert_eq!(r.step_count, 1);
        assert_eq!(r.convergence_estimate, 0.0);
    }

    #[test]
    fn zero_amplitude_modulation_is_free_evolution() {
        let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
        let seg = PulseSegment::idle(7.0).with_coupling(
            (1, 2),
            Coupling::Sinusoid {
                amplitude: 0.0,
                omega: 0.5,
                phase: 0.3,
            },
        );
        let schedule = PulseSchedule::new(device.clone(), vec![seg]).unwrap();
        let r = evolve(&schedule, None).unwrap();
        let free = expm_hermitian(&zeeman(&device), 7.0).unwrap();
        assert!(r.final_unitary.max_abs_diff(&free) < 1e-10);
    }

    #[test]
    fn leakage_trace_is_sampled_and_flat_for_intra_pair_drive() {
        let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
        let seg = PulseSegment::idle(30.0).with_coupling(
            (1, 2),
            Coupling::Sinusoid {
                amplitude: 0.05,
                omega: 0.5,
                phase: 0.0,
            },
        );
        let schedule = PulseSchedule::new(device, vec![seg, PulseSegment::exchange(&[(1, 2)], 1.0, 2.0)]).unwrap();
        let basis = logical_qubit_basis(2, (1, 2)).unwrap();
        let r = evolve(&schedule, Some(&basis)).unwrap();
        assert!(r.leakage_trace.len() >= 30);
        assert!(r.leakage_trace.iter().all(|&(_, l)| l < 1e-10));
        assert!(r.leakage_trace.windows(2).all(|w| w[0].0 <= w[1].0));
        assert!((r.leakage_trace.last().unwrap().0 - 32.0).abs() < 1e-12);
    }

    #[test]
    fn step_cap_reports_non_convergence() {
        let device = DeviceConfig::single_qubit(1.0, 1.5, 1.0);
        let seg = PulseSegment::idle(100.0).with_coupling(
            (1, 2),
            Coupling::Sinusoid {
                amplitude: 1.0,
                omega: 3.0,
                phase: 0.0,
            },
        );
        let schedule = PulseSchedule::new(device, vec![seg]).unwrap();
        let options = EvolveOptions {
            max_steps: 64,
            ..EvolveOptions::default()
        };
        assert!(matches!(
            evolve_with(&schedule, None, &options),
            Err(Error::NonConvergence { .. })
        ));
    }
}
