use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::lower::CompileStats;
use super::timing::UnitSystem;
use crate::dynamics::{Coupling, PulseSchedule, PulseSegment};
use crate::error::{Error, Result};
use crate::spin::DeviceFile;

/// One bond entry of a segment, in lab units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum BondDrive {
    Constant {
        i: usize,
        j: usize,
        j_mev: f64,
    },
    Sin {
        i: usize,
        j: usize,
        amp_mev: f64,
        carrier_ghz: f64,
        /// Phase at schedule time zero.
        phase_rad: f64,
    },
}

impl BondDrive {
    fn bond(&self) -> (usize, usize) {
        match *self {
            BondDrive::Constant { i, j, .. } | BondDrive::Sin { i, j, .. } => (i, j),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDoc {
    pub duration_ps: f64,
    pub bonds: Vec<BondDrive>,
    pub zeeman: bool,
}

/// Schedule file contents, in picoseconds, meV and GHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDocument {
    pub device: DeviceFile,
    pub segments: Vec<SegmentDoc>,
    pub stats: CompileStats,
}

impl ScheduleDocument {
    pub fn from_schedule(schedule: &PulseSchedule, stats: &CompileStats, units: &UnitSystem) -> Self {
        let segments = schedule
            .segments()
            .iter()
            .map(|seg| SegmentDoc {
                duration_ps: units.to_ps(seg.duration),
                bonds: seg
                    .couplings
                    .iter()
                    .map(|(&(i, j), c)| match *c {
                        Coupling::Constant(v) => BondDrive::Constant {
                            i,
                            j,
                            j_mev: units.coupling_to_mev(v),
                        },
                        Coupling::Sinusoid {
                            amplitude,
                            omega,
                            phase,
                        } => BondDrive::Sin {
                            i,
                            j,
                            amp_mev: units.coupling_to_mev(amplitude),
                            carrier_ghz: units.omega_to_ghz(omega),
                            phase_rad: phase,
                        },
                    })
                    .collect(),
                zeeman: seg.zeeman,
            })
            .collect();
        Self {
            device: schedule.device().to_file(),
            segments,
            stats: *stats,
        }
    }

    pub fn to_schedule(&self, units: &UnitSystem) -> Result<PulseSchedule> {
        let device = self.device.clone().into_config()?;
        let mut segments = Vec::with_capacity(self.segments.len());
        for (k, doc) in self.segments.iter().enumerate() {
            let mut couplings = BTreeMap::new();
            for drive in &doc.bonds {
                let coupling = match *drive {
                    BondDrive::Constant { j_mev, .. } => Coupling::Constant(units.coupling_from_mev(j_mev)),
                    BondDrive::Sin {
                        amp_mev,
                        carrier_ghz,
                        phase_rad,
                        ..
                    } => Coupling::Sinusoid {
                        amplitude: units.coupling_from_mev(amp_mev),
                        omega: units.omega_from_ghz(carrier_ghz),
                        phase: phase_rad,
                    },
                };
                if couplings.insert(drive.bond(), coupling).is_some() {
                    return Err(Error::InvalidSchedule(format!(
                        "segment {k} lists bond {:?} twice",
                        drive.bond()
                    )));
                }
            }
            segments.push(PulseSegment {
                duration: units.from_ps(doc.duration_ps),
                couplings,
                zeeman: doc.zeeman,
            });
        }
        PulseSchedule::new(device, segments)
    }

    /// Canonical text: sorted keys, two-space indent, floats with 17
    /// significant digits, integers as integers.
    pub fn render(&self) -> String {
        let value = serde_json::to_value(self).expect("schedule documents always serialize");
        let mut out = String::new();
        render_value(&value, 0, &mut out);
        out.push('\n');
        out
    }
}

/// Parses schedule JSON, reporting the line of any syntax or schema error.
pub fn parse_schedule(text: &str) -> Result<ScheduleDocument> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line().max(1),
        message: e.to_string(),
    })
}

pub fn export_schedule(schedule: &PulseSchedule, stats: &CompileStats, units: &UnitSystem) -> String {
    ScheduleDocument::from_schedule(schedule, stats, units).render()
}

/// Loads a schedule file straight into natural units.
pub fn import_schedule(text: &str, units: &UnitSystem) -> Result<PulseSchedule> {
    parse_schedule(text)?.to_schedule(units)
}

fn render_value(value: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                write!(out, "{:.16e}", n.as_f64().unwrap_or(f64::NAN)).unwrap();
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                render_value(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                render_value(&map[key.as_str()], indent + 1, out);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}
