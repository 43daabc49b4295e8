use serde::Serialize;
use spinpair_core::compiler::{ClockEstimate, TimingModel};
use spinpair_core::estimate_clock;

use crate::options::{print_json, Preset};
use crate::{CliResult, Outcome};

#[derive(clap::Args)]
pub struct Args {
    /// g-factor difference within a pair.
    #[arg(long, allow_hyphen_values = true)]
    delta_g: Option<f64>,
    /// External field in Tesla.
    #[arg(long, allow_hyphen_values = true)]
    field_tesla: Option<f64>,
    /// Exchange strength in meV.
    #[arg(long, allow_hyphen_values = true)]
    j_mev: Option<f64>,
    /// Start from a built-in parameter set; explicit flags override it.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    model: TimingModel,
    estimate: ClockEstimate,
    reference_scenario: TimingModel,
    reference_estimate: ClockEstimate,
}

pub fn run(args: &Args) -> CliResult {
    let (dg, h) = match args.preset {
        Some(p) => (p.delta_g(), p.field_tesla()),
        None => (1.0, 1.0),
    };
    let model = TimingModel::new(
        args.delta_g.unwrap_or(dg),
        args.field_tesla.unwrap_or(h),
        args.j_mev.unwrap_or(1.0),
    );
    let reference_scenario = TimingModel::si_ge();
    let report = Report {
        model,
        estimate: estimate_clock(&model)?,
        reference_scenario,
        reference_estimate: estimate_clock(&reference_scenario)?,
    };
    if args.json {
        print_json(&report);
    } else {
        print_table(&report);
    }
    Ok(Outcome::Pass)
}

fn print_table(r: &Report) {
    let (m, s) = (&r.model, &r.reference_scenario);
    let (e, f) = (&r.estimate, &r.reference_estimate);
    println!("{:<22} {:>14} {:>14}", "", "requested", "Si/Ge");
    println!("{:<22} {:>14} {:>14}", "Δg", m.delta_g, s.delta_g);
    println!("{:<22} {:>14} {:>14}", "H (T)", m.h_ext_tesla, s.h_ext_tesla);
    println!("{:<22} {:>14} {:>14}", "J (meV)", m.j_ex_mev, s.j_ex_mev);
    println!("{:<22} {:>14.4} {:>14.4}", "t_z(π) (ps)", e.t_z_pi_ps, f.t_z_pi_ps);
    println!("{:<22} {:>14.4} {:>14.4}", "t_x(π) (ps)", e.t_x_pi_ps, f.t_x_pi_ps);
    println!(
        "{:<22} {:>14.4} {:>14.4}",
        "nAND duration (ps)", e.nand_duration_ps, f.nand_duration_ps
    );
    println!("{:<22} {:>14.4} {:>14.4}", "clock (GHz)", e.clock_ghz, f.clock_ghz);
    println!(
        "quoted clock ~{} GHz; Si/Ge model differs by {:.1}%{}",
        f.reference_clock_ghz,
        100.0 * f.relative_discrepancy,
        if f.discrepancy_flag {
            " (discrepancy flagged)"
        } else {
            ""
        }
    );
    if (m.delta_g, m.h_ext_tesla, m.j_ex_mev) != (s.delta_g, s.h_ext_tesla, s.j_ex_mev) {
        println!(
            "requested model differs from ~{} GHz by {:.1}%{}",
            e.reference_clock_ghz,
            100.0 * e.relative_discrepancy,
            if e.discrepancy_flag { " (flagged)" } else { "" }
        );
    }
}
