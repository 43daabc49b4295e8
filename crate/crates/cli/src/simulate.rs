use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::anyhow;
use clap::ValueEnum;
use serde::Serialize;
use spinpair_core::compiler::{import_schedule, UnitSystem};
use spinpair_core::dynamics::{rabi_frequency, rotating_frame, synthesize_resonant_pulse};
use spinpair_core::encoding::consecutive_pairs_basis;
use spinpair_core::gates::{cnot_matrix, nand_matrix};
use spinpair_core::linalg::half_pauli_x;
use spinpair_core::{
    compare_up_to_global_phase, evolve, expm_hermitian, leakage, zeeman, ComplexMatrix, Layout, PulseSchedule,
};

use crate::options::{print_json, read_file, write_file, DeviceArgs};
use crate::{CliError, CliResult, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Pulse {
    #[value(name = "pi")]
    Pi,
    #[value(name = "pi/2")]
    HalfPi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Target {
    Nand,
    Cnot,
    XPi,
    XHalfPi,
}

impl Target {
    fn matrix(self) -> ComplexMatrix {
        match self {
            Target::Nand => nand_matrix(),
            Target::Cnot => cnot_matrix(),
            Target::XPi => expm_hermitian(&half_pauli_x(), PI).expect("Σx is Hermitian"),
            Target::XHalfPi => expm_hermitian(&half_pauli_x(), FRAC_PI_2).expect("Σx is Hermitian"),
        }
    }
}

#[derive(clap::Args)]
pub struct Args {
    /// Schedule JSON produced by `compile`.
    #[arg(long, conflicts_with = "pulse", required_unless_present = "pulse")]
    schedule: Option<PathBuf>,
    /// Synthesize a resonant X pulse on one qubit instead.
    #[arg(long, value_enum)]
    pulse: Option<Pulse>,
    /// Drive amplitude as a fraction of the qubit frequency.
    #[arg(long, default_value_t = 0.05)]
    jamp: f64,
    #[command(flatten)]
    device: DeviceArgs,
    /// Logical unitary to compare against; pulses default to their own rotation.
    #[arg(long, value_enum)]
    target: Option<Target>,
    /// Exit 1 when the fidelity against `--target` is below this value.
    #[arg(long)]
    min_fidelity: Option<f64>,
    /// Write the leakage trace as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    frame: &'static str,
    n_spins: usize,
    segments: usize,
    duration_ps: f64,
    step_count: usize,
    convergence_estimate: f64,
    final_leakage: f64,
    max_leakage: f64,
    target: Option<Target>,
    fidelity: Option<f64>,
}

pub fn run(args: &Args) -> CliResult {
    let units = UnitSystem::default();
    let (schedule, rotating) = match (&args.schedule, args.pulse) {
        (Some(path), _) => (import_schedule(&read_file(path)?, &units)?, false),
        (None, Some(pulse)) => {
            let device = args
                .device
                .resolve(1, Layout::Longitudinal1d, 1.0)?
                .qubit_subdevice(0)?;
            let angle = match pulse {
                Pulse::Pi => PI,
                Pulse::HalfPi => FRAC_PI_2,
            };
            let amplitude = args.jamp * rabi_frequency(&device)?;
            (synthesize_resonant_pulse(&device, angle, amplitude)?, true)
        }
        (None, None) => return Err(anyhow!("give --schedule or --pulse").into()),
    };
    let target = args.target.or(match args.pulse {
        Some(Pulse::Pi) => Some(Target::XPi),
        Some(Pulse::HalfPi) => Some(Target::XHalfPi),
        None => None,
    });
    let report = simulate(&schedule, rotating, target, &units, args.csv.as_ref())?;
    if args.json {
        print_json(&report);
    } else {
        print_summary(&report);
    }
    let below = matches!((report.fidelity, args.min_fidelity), (Some(f), Some(min)) if f < min);
    Ok(if below { Outcome::Fail } else { Outcome::Pass })
}

fn simulate(
    schedule: &PulseSchedule,
    rotating: bool,
    target: Option<Target>,
    units: &UnitSystem,
    csv: Option<&PathBuf>,
) -> Result<Report, CliError> {
    let device = schedule.device();
    let basis = consecutive_pairs_basis(device.n_spins())?;
    let result = evolve(schedule, Some(&basis))?;
    let u = if rotating {
        rotating_frame(&result.final_unitary, &zeeman(device), schedule.duration())?
    } else {
        result.final_unitary.clone()
    };
    let fidelity = match target {
        Some(t) => {
            let ideal = t.matrix();
            if ideal.dim() != basis.dim() {
                return Err(anyhow!(
                    "target {t:?} acts on {} logical states but the device has {}",
                    ideal.dim(),
                    basis.dim()
                )
                .into());
            }
            Some(compare_up_to_global_phase(&ideal, &basis.restrict(&u)?)?.fidelity)
        }
        None => None,
    };
    if let Some(path) = csv {
        let mut text = String::from("time_ps,leakage\n");
        for (t, l) in &result.leakage_trace {
            writeln!(text, "{:.9e},{:.9e}", units.to_ps(*t), l).expect("writing to a String");
        }
        write_file(path, &text)?;
    }
    Ok(Report {
        frame: if rotating { "rotating" } else { "lab" },
        n_spins: device.n_spins(),
        segments: schedule.segments().len(),
        duration_ps: units.to_ps(schedule.duration()),
        step_count: result.step_count,
        convergence_estimate: result.convergence_estimate,
        final_leakage: leakage(&result.final_unitary, &basis)?,
        max_leakage: result.leakage_trace.iter().map(|&(_, l)| l).fold(0.0, f64::max),
        target,
        fidelity,
    })
}

fn print_summary(r: &Report) {
    println!("frame              {}", r.frame);
    println!("spins              {}", r.n_spins);
    println!("segments           {}", r.segments);
    println!("duration           {:.6} ps", r.duration_ps);
    println!("steps              {}", r.step_count);
    println!("convergence        {:.3e}", r.convergence_estimate);
    println!("final leakage      {:.3e}", r.final_leakage);
    println!("max leakage        {:.3e}", r.max_leakage);
    if let (Some(t), Some(f)) = (r.target, r.fidelity) {
        let name = t
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default();
        println!("fidelity vs {name:<6} {f:.12}");
    }
}
