use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{DeviceConfig, SI_GE_DELTA_G, SI_GE_FIELD_TESLA};

/// Z π-rotation time at `Δg·H = 1 T`, in ps.
pub const COEFF_Z_PS: f64 = 35.0;
/// X π-rotation time at `J = 1 meV`, in ps.
pub const COEFF_X_PS: f64 = 0.5;
/// Clock rate quoted for the Si/Ge scenario, GHz.
pub const REFERENCE_CLOCK_GHZ: f64 = 6.0;
/// Relative difference above which the clock comparison is flagged.
pub const CLOCK_DISCREPANCY_THRESHOLD: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingModel {
    pub delta_g: f64,
    pub h_ext_tesla: f64,
    pub j_ex_mev: f64,
    pub coeff_z_ps: f64,
    pub coeff_x_ps: f64,
}

impl TimingModel {
    pub fn new(delta_g: f64, h_ext_tesla: f64, j_ex_mev: f64) -> Self {
        Self {
            delta_g,
            h_ext_tesla,
            j_ex_mev,
            coeff_z_ps: COEFF_Z_PS,
            coeff_x_ps: COEFF_X_PS,
        }
    }

    pub fn si_ge() -> Self {
        Self::new(SI_GE_DELTA_G, SI_GE_FIELD_TESLA, 1.0)
    }

    /// Δg of the first qubit and the device field.
    pub fn for_device(device: &DeviceConfig, j_ex_mev: f64) -> Self {
        let delta_g = if device.n_logical() > 0 { device.delta_g(0) } else { 0.0 };
        Self::new(delta_g, device.field_b(), j_ex_mev)
    }

    pub fn units(&self) -> UnitSystem {
        UnitSystem::new(self.coeff_z_ps, self.coeff_x_ps)
    }
}

/// `(|θ|/π) · coeff_z / (|Δg| · H)` picoseconds.
pub fn duration_z(theta: f64, timing: &TimingModel) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::InvalidTiming(format!("angle must be finite, got {theta}")));
    }
    if timing.delta_g == 0.0 {
        return Err(Error::DegenerateZeeman);
    }
    if !(timing.h_ext_tesla > 0.0 && timing.h_ext_tesla.is_finite()) {
        return Err(Error::InvalidTiming(format!(
            "external field must be positive, got {} T",
            timing.h_ext_tesla
        )));
    }
    Ok(theta.abs() / PI * timing.coeff_z_ps / (timing.delta_g.abs() * timing.h_ext_tesla))
}

/// `(|θ|/π) · coeff_x / J` picoseconds.
pub fn duration_x(theta: f64, timing: &TimingModel) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::InvalidTiming(format!("angle must be finite, got {theta}")));
    }
    if !(timing.j_ex_mev > 0.0 && timing.j_ex_mev.is_finite()) {
        return Err(Error::InvalidTiming(format!(
            "exchange must be positive, got {} meV",
            timing.j_ex_mev
        )));
    }
    Ok(theta.abs() / PI * timing.coeff_x_ps / timing.j_ex_mev)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockEstimate {
    pub t_z_pi_ps: f64,
    pub t_x_pi_ps: f64,
    pub nand_duration_ps: f64,
    pub clock_ghz: f64,
    pub reference_clock_ghz: f64,
    /// `|clock − reference| / reference`.
    pub relative_discrepancy: f64,
    pub discrepancy_flag: bool,
}

/// nAND time `t_z(π) + t_z(π/2) + 2·t_x(π/2)` and the clock it allows.
pub fn estimate_clock(timing: &TimingModel) -> Result<ClockEstimate> {
    let t_z_pi_ps = duration_z(PI, timing)?;
    let t_x_pi_ps = duration_x(PI, timing)?;
    let nand_duration_ps = t_z_pi_ps + duration_z(FRAC_PI_2, timing)? + 2.0 * duration_x(FRAC_PI_2, timing)?;
    let clock_ghz = 1000.0 / nand_duration_ps;
    let relative_discrepancy = (clock_ghz - REFERENCE_CLOCK_GHZ).abs() / REFERENCE_CLOCK_GHZ;
    Ok(ClockEstimate {
        t_z_pi_ps,
        t_x_pi_ps,
        nand_duration_ps,
        clock_ghz,
        reference_clock_ghz: REFERENCE_CLOCK_GHZ,
        relative_discrepancy,
        discrepancy_flag: relative_discrepancy > CLOCK_DISCREPANCY_THRESHOLD,
    })
}

/// Conversion between natural units and lab units.
///
/// The time unit is chosen so that a Zeeman splitting of `Δg·H` (H in Tesla)
/// gives a Z π rotation in exactly `coeff_z/(Δg·H)` ps, and an exchange of
/// `J` meV is the natural coupling `J·coeff_z/coeff_x`, giving an X π
/// rotation in `coeff_x/J` ps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSystem {
    /// One natural time unit in ps.
    pub time_unit_ps: f64,
    /// Natural coupling per meV.
    pub coupling_per_mev: f64,
}

impl UnitSystem {
    pub fn new(coeff_z_ps: f64, coeff_x_ps: f64) -> Self {
        Self {
            time_unit_ps: coeff_z_ps / PI,
            coupling_per_mev: coeff_z_ps / coeff_x_ps,
        }
    }

    pub fn to_ps(&self, t: f64) -> f64 {
        t * self.time_unit_ps
    }

    pub fn from_ps(&self, ps: f64) -> f64 {
        ps / self.time_unit_ps
    }

    pub fn coupling_from_mev(&self, mev: f64) -> f64 {
        mev * self.coupling_per_mev
    }

    pub fn coupling_to_mev(&self, j: f64) -> f64 {
        j / self.coupling_per_mev
    }

    /// Angular frequency (rad per time unit) to GHz.
    pub fn omega_to_ghz(&self, omega: f64) -> f64 {
        omega / (TAU * self.time_unit_ps) * 1000.0
    }

    pub fn omega_from_ghz(&self, ghz: f64) -> f64 {
        ghz / 1000.0 * TAU * self.time_unit_ps
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::new(COEFF_Z_PS, COEFF_X_PS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duration_formula_values() {
        assert_eq!(duration_z(PI, &TimingModel::new(1.0, 1.0, 1.0)).unwrap(), 35.0);
        assert_eq!(duration_x(PI, &TimingModel::new(1.0, 1.0, 1.0)).unwrap(), 0.5);
        assert_eq!(duration_x(FRAC_PI_2, &TimingModel::new(1.0, 1.0, 1.0)).unwrap(), 0.25);
        assert!((duration_x(PI, &TimingModel::new(1.0, 1.0, 0.1)).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(duration_z(0.0, &TimingModel::si_ge()).unwrap(), 0.0);
        assert!((duration_z(PI, &TimingModel::si_ge()).unwrap() - 40.2299).abs() < 1e-4);
    }

    #[test]
    fn invalid_timing() {
        assert_eq!(
            duration_z(PI, &TimingModel::new(0.0, 1.0, 1.0)),
            Err(Error::DegenerateZeeman)
        );
        assert!(duration_z(PI, &TimingModel::new(1.0, 0.0, 1.0)).is_err());
        assert!(duration_x(PI, &TimingModel::new(1.0, 1.0, 0.0)).is_err());
        assert!(duration_x(PI, &TimingModel::new(1.0, 1.0, -1.0)).is_err());
    }

    #[test]
    fn clock_estimate_si_ge() {
        let est = estimate_clock(&TimingModel::si_ge()).unwrap();
        assert!((est.nand_duration_ps - 60.845).abs() < 1e-3);
        assert!((est.clock_ghz - 16.435).abs() < 1e-2);
        assert!(est.discrepancy_flag);
        let fast = estimate_clock(&TimingModel::new(1e9, 1.0, 1.0)).unwrap();
        assert!((fast.nand_duration_ps - 2.0 * 0.25).abs() < 1e-6);
    }

    #[test]
    fn units_reproduce_duration_formulas() {
        let u = UnitSystem::default();
        let (dg, h, j) = (0.435, 2.0, 0.7);
        let t_z = PI / (dg * h);
        assert!((u.to_ps(t_z) - 35.0 / (dg * h)).abs() < 1e-12);
        let t_x = PI / u.coupling_from_mev(j);
        assert!((u.to_ps(t_x) - 0.5 / j).abs() < 1e-12);
        let w = 0.87;
        assert!((u.omega_from_ghz(u.omega_to_ghz(w)) - w).abs() < 1e-15);
    }
}
