use std::path::PathBuf;

use spinpair_core::compiler::export_schedule;
use spinpair_core::{lower_with, parse_circuit, CompileOptions, Layout, RyPolicy, TimingModel};

use crate::options::{read_file, write_file, DeviceArgs};
use crate::{CliResult, Outcome};

#[derive(clap::Args)]
pub struct Args {
    /// Circuit file (`qubits N` header, one gate per line).
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    device: DeviceArgs,
    /// Exchange strength used for every exchange pulse, in meV.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    j_mev: f64,
    /// Layout of the generated device when no `--device` file is given.
    #[arg(long, default_value = "longitudinal-1d")]
    layout: Layout,
    /// How RY gates are realized: composite or resonant.
    #[arg(long, default_value = "composite")]
    ry_policy: RyPolicy,
    /// Schedule output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Print the compile statistics as JSON.
    #[arg(long)]
    json: bool,
}

pub fn run(args: &Args) -> CliResult {
    let circuit = parse_circuit(&read_file(&args.circuit)?)?;
    let device = args.device.resolve(circuit.n_logical, args.layout, args.j_mev)?;
    let timing = TimingModel::for_device(&device, args.j_mev);
    let options = CompileOptions {
        ry_policy: args.ry_policy,
        ..CompileOptions::default()
    };
    let (schedule, stats) = lower_with(&circuit, &device, &timing, &options)?;
    let text = export_schedule(&schedule, &stats, &timing.units());
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    let summary = if args.json {
        serde_json::to_string_pretty(&stats).expect("stats always serialize")
    } else {
        format!(
            "exchange ops        {}\nz evolutions        {}\nresonant pulses     {}\ntotal duration      {:.6} ps",
            stats.exchange_op_count, stats.z_evolution_count, stats.resonant_pulse_count, stats.total_duration_ps
        )
    };
    if args.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(Outcome::Pass)
}
