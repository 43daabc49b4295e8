use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use spinpair_core::spin::{SI_GE_DELTA_G, SI_GE_FIELD_TESLA, SI_GE_G1};
use spinpair_core::{DeviceConfig, Layout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// g = (1, 1.5) per pair, B = 1.
    Demo,
    /// Δg = 0.435, H = 2 T.
    SiGe,
}

impl Preset {
    pub fn g1(self) -> f64 {
        match self {
            Preset::Demo => 1.0,
            Preset::SiGe => SI_GE_G1,
        }
    }

    pub fn delta_g(self) -> f64 {
        match self {
            Preset::Demo => 0.5,
            Preset::SiGe => SI_GE_DELTA_G,
        }
    }

    pub fn field_tesla(self) -> f64 {
        match self {
            Preset::Demo => 1.0,
            Preset::SiGe => SI_GE_FIELD_TESLA,
        }
    }
}

/// Device selection shared by the subcommands.
#[derive(clap::Args, Clone, Debug, Default)]
pub struct DeviceArgs {
    /// Device file (.toml or .json).
    #[arg(long, conflicts_with = "preset")]
    pub device: Option<PathBuf>,
    /// Built-in parameter set.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// g₂ − g₁ on every pair.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_g: Option<f64>,
    /// Static field in Tesla.
    #[arg(long, allow_hyphen_values = true)]
    pub field_tesla: Option<f64>,
}

impl DeviceArgs {
    /// Device file if given, otherwise a generated register with
    /// `n_logical` pairs; `--delta-g` and `--field-tesla` override either.
    pub fn resolve(&self, n_logical: usize, layout: Layout, j_max_mev: f64) -> anyhow::Result<DeviceConfig> {
        let mut device = match &self.device {
            Some(path) => load_device(path)?,
            None => {
                let preset = self.preset.unwrap_or(Preset::Demo);
                let g1 = preset.g1();
                let dg = self.delta_g.unwrap_or(preset.delta_g());
                let b = self.field_tesla.unwrap_or(preset.field_tesla());
                return Ok(DeviceConfig::with_layout(layout, n_logical, g1, g1 + dg, b, j_max_mev)?);
            }
        };
        if let Some(dg) = self.delta_g {
            device = device.with_delta_g(dg)?;
        }
        if let Some(b) = self.field_tesla {
            device = device.with_field(b)?;
        }
        Ok(device)
    }
}

pub fn load_device(path: &Path) -> anyhow::Result<DeviceConfig> {
    DeviceConfig::load(path).with_context(|| format!("loading device {}", path.display()))
}

pub fn read_file(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn print_json(value: &impl serde::Serialize) {
    let text = serde_json::to_string_pretty(value).expect("reports always serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}
