//! Spin-1/2 operators, Heisenberg and Zeeman Hamiltonians, and the device
//! description they are built from.
//!
//! Spins are numbered from 1, spin 1 being the most significant tensor
//! factor. `|0⟩` is spin up (`m = +1/2`). Energies are in natural units with
//! `ħ = μ_B = 1`: the Zeeman term of spin `i` is `g_i · B · S_iᶻ` with `B`
//! given in Tesla. Exchange strengths in a [`DeviceConfig`] are stored in meV
//! and only converted by the pulse compiler.
//!
//! Rotation angles passed to [`rotation_gate`] are geometric rotation angles
//! about the chosen axis, independent of the g-factor of the spin.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, expm_hermitian, kron, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub const ALL: [SpinAxis; 3] = [SpinAxis::X, SpinAxis::Y, SpinAxis::Z];

    /// Half-Pauli matrix `σ^α / 2`.
    pub fn half_pauli(self) -> ComplexMatrix {
        match self {
            SpinAxis::X => crate::linalg::half_pauli_x(),
            SpinAxis::Y => crate::linalg::half_pauli_y(),
            SpinAxis::Z => crate::linalg::half_pauli_z(),
        }
    }

    /// The axis `γ` and sign `ε^{αβγ}` with `[S^α, S^β] = i ε^{αβγ} S^γ`.
    pub fn cross(self, other: SpinAxis) -> Option<(SpinAxis, f64)> {
        use SpinAxis::*;
        match (self, other) {
            (X, Y) => Some((Z, 1.0)),
            (Y, Z) => Some((X, 1.0)),
            (Z, X) => Some((Y, 1.0)),
            (Y, X) => Some((Z, -1.0)),
            (Z, Y) => Some((X, -1.0)),
            (X, Z) => Some((Y, -1.0)),
            _ => None,
        }
    }
}

impl fmt::Display for SpinAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpinAxis::X => "x",
            SpinAxis::Y => "y",
            SpinAxis::Z => "z",
        };
        f.write_str(s)
    }
}

/// Coupling topology of a device.
///
/// Logical qubit `q` (0-based) always occupies spins `2q+1, 2q+2` with an
/// intra-pair bond between them. The named layouts add inter-qubit bonds
/// between neighbouring qubits; each one joins a first-slot spin to a
/// second-slot spin so that the two spins carry different g-factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// Pairs end to end along a line: `(2a+2, 2b+1)`.
    #[serde(rename = "longitudinal-1d")]
    Longitudinal1d,
    /// Pairs side by side along a line: `(2a+1, 2b+2)`.
    #[serde(rename = "vertical-1d")]
    Vertical1d,
    /// Square grid, end-to-end couplings.
    #[serde(rename = "horizontal-2d")]
    Horizontal2d,
    /// Square grid, side-by-side couplings.
    #[serde(rename = "vertical-2d")]
    Vertical2d,
    Custom,
}

impl Layout {
    pub fn as_str(self) -> &'static str {
        match self {
            Layout::Longitudinal1d => "longitudinal-1d",
            Layout::Vertical1d => "vertical-1d",
            Layout::Horizontal2d => "horizontal-2d",
            Layout::Vertical2d => "vertical-2d",
            Layout::Custom => "custom",
        }
    }

    /// Pairs of adjacent logical qubits `(a, b)` with `a < b`.
    pub fn adjacent_qubits(self, n_logical: usize) -> Vec<(usize, usize)> {
        match self {
            Layout::Longitudinal1d | Layout::Vertical1d => (1..n_logical).map(|q| (q - 1, q)).collect(),
            Layout::Horizontal2d | Layout::Vertical2d => {
                let width = (n_logical as f64).sqrt().ceil().max(1.0) as usize;
                let mut out = Vec::new();
                for q in 0..n_logical {
                    if (q + 1) % width != 0 && q + 1 < n_logical {
                        out.push((q, q + 1));
                    }
                    if q + width < n_logical {
                        out.push((q, q + width));
                    }
                }
                out
            }
            Layout::Custom => Vec::new(),
        }
    }

    /// Inter-qubit bond realizing the coupling between adjacent qubits `a < b`.
    pub fn inter_qubit_bond(self, a: usize, b: usize) -> (usize, usize) {
        match self {
            Layout::Vertical1d | Layout::Vertical2d => (2 * a + 1, 2 * b + 2),
            _ => (2 * a + 2, 2 * b + 1),
        }
    }

    /// Full bond list (intra-pair bonds first) for `n_logical` qubits.
    pub fn bonds(self, n_logical: usize) -> Vec<(usize, usize)> {
        let mut bonds: Vec<(usize, usize)> = (0..n_logical).map(|q| (2 * q + 1, 2 * q + 2)).collect();
        bonds.extend(
            self.adjacent_qubits(n_logical)
                .into_iter()
                .map(|(a, b)| self.inter_qubit_bond(a, b)),
        );
        bonds
    }
}

impl FromStr for Layout {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "longitudinal-1d" => Ok(Layout::Longitudinal1d),
            "vertical-1d" => Ok(Layout::Vertical1d),
            "horizontal-2d" => Ok(Layout::Horizontal2d),
            "vertical-2d" => Ok(Layout::Vertical2d),
            "custom" => Ok(Layout::Custom),
            other => Err(Error::Config(format!("unknown layout {other:?}"))),
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Exchange bond between spins `i < j` with its maximum strength in meV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub j_max_mev: f64,
}

/// Spin register, g-factors, static field and exchange graph.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceConfig {
    n_spins: usize,
    g_factors: Vec<f64>,
    field_b: f64,
    bonds: Vec<Bond>,
    layout: Layout,
}

impl DeviceConfig {
    pub fn new(g_factors: Vec<f64>, field_b: f64, bonds: Vec<Bond>, layout: Layout) -> Result<Self> {
        let config = Self {
            n_spins: g_factors.len(),
            g_factors,
            field_b,
            bonds,
            layout,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidDevice(msg));
        if self.n_spins == 0 {
            return invalid("device needs at least one spin".into());
        }
        if self.g_factors.iter().any(|g| !g.is_finite()) || !self.field_b.is_finite() {
            return invalid("g-factors and field must be finite".into());
        }
        let mut seen = BTreeSet::new();
        for bond in &self.bonds {
            if bond.i == 0 || bond.j > self.n_spins || bond.i >= bond.j {
                return invalid(format!(
                    "bond ({}, {}) must satisfy 1 <= i < j <= {}",
                    bond.i, bond.j, self.n_spins
                ));
            }
            if !bond.j_max_mev.is_finite() || bond.j_max_mev < 0.0 {
                return invalid(format!("bond ({}, {}) has invalid strength", bond.i, bond.j));
            }
            if !seen.insert((bond.i, bond.j)) {
                return invalid(format!("duplicate bond ({}, {})", bond.i, bond.j));
            }
        }
        if self.layout != Layout::Custom {
            if self.n_spins % 2 != 0 {
                return invalid(format!("layout {} needs an even number of spins", self.layout));
            }
            let expected: BTreeSet<_> = self.layout.bonds(self.n_spins / 2).into_iter().collect();
            if expected != seen {
                return invalid(format!(
                    "bonds do not match the {} adjacency pattern (expected {:?})",
                    self.layout, expected
                ));
            }
        }
        Ok(())
    }

    /// One logical qubit: two spins with an intra-pair bond.
    pub fn single_qubit(g1: f64, g2: f64, field_b: f64) -> Self {
        Self::with_layout(Layout::Longitudinal1d, 1, g1, g2, field_b, 1.0).expect("single-qubit device is always valid")
    }

    /// Two logical qubits coupled end to end through bond (2, 3).
    pub fn two_qubit(g1: f64, g2: f64, field_b: f64) -> Self {
        Self::with_layout(Layout::Longitudinal1d, 2, g1, g2, field_b, 1.0).expect("two-qubit device is always valid")
    }

    /// `n_logical` qubits with g-factors `(g1, g2)` on every pair, all bonds at `j_max_mev`.
    pub fn with_layout(
        layout: Layout,
        n_logical: usize,
        g1: f64,
        g2: f64,
        field_b: f64,
        j_max_mev: f64,
    ) -> Result<Self> {
        let layout_for_bonds = if layout == Layout::Custom {
            Layout::Longitudinal1d
        } else {
            layout
        };
        let bonds = layout_for_bonds
            .bonds(n_logical)
            .into_iter()
            .map(|(i, j)| Bond { i, j, j_max_mev })
            .collect();
        let g = (0..n_logical).flat_map(|_| [g1, g2]).collect();
        Self::new(g, field_b, bonds, layout)
    }

    /// Demo device: two qubits, g = (1, 1.5, 1, 1.5), B = 1.
    pub fn demo() -> Self {
        Self::two_qubit(1.0, 1.5, 1.0)
    }

    /// Si/Ge scenario: Δg = 0.435 at 2 T.
    pub fn si_ge() -> Self {
        Self::two_qubit(SI_GE_G1, SI_GE_G1 + SI_GE_DELTA_G, SI_GE_FIELD_TESLA)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn g_factors(&self) -> &[f64] {
        &self.g_factors
    }

    pub fn field_b(&self) -> f64 {
        self.field_b
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn has_bond(&self, i: usize, j: usize) -> bool {
        self.bond(i, j).is_some()
    }

    pub fn bond(&self, i: usize, j: usize) -> Option<&Bond> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.bonds.iter().find(|bond| bond.i == a && bond.j == b)
    }

    /// Number of complete spin pairs.
    pub fn n_logical(&self) -> usize {
        self.n_spins / 2
    }

    /// Spins of logical qubit `q` (0-based), 1-based spin indices.
    pub fn pair(&self, q: usize) -> (usize, usize) {
        (2 * q + 1, 2 * q + 2)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n_logical()).map(|q| self.pair(q)).collect()
    }

    /// `Δg = g₂ − g₁` of logical qubit `q`.
    pub fn delta_g(&self, q: usize) -> f64 {
        let (i, j) = self.pair(q);
        self.g_factors[j - 1] - self.g_factors[i - 1]
    }

    /// Logical qubit a spin belongs to, with its slot (0 = first, 1 = second).
    pub fn qubit_of_spin(&self, spin: usize) -> Option<(usize, usize)> {
        (spin >= 1 && spin <= 2 * self.n_logical()).then(|| ((spin - 1) / 2, (spin - 1) % 2))
    }

    pub fn with_field(&self, field_b: f64) -> Result<Self> {
        Self::new(self.g_factors.clone(), field_b, self.bonds.clone(), self.layout)
    }

    pub fn with_g_factors(&self, g_factors: Vec<f64>) -> Result<Self> {
        if g_factors.len() != self.n_spins {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins,
                found: g_factors.len(),
            });
        }
        Self::new(g_factors, self.field_b, self.bonds.clone(), self.layout)
    }

    /// Sets every pair to `(g₁, g₁ + Δg)`, keeping each pair's first g-factor.
    pub fn with_delta_g(&self, delta_g: f64) -> Result<Self> {
        let mut g = self.g_factors.clone();
        for q in 0..self.n_logical() {
            let (i, j) = self.pair(q);
            g[j - 1] = g[i - 1] + delta_g;
        }
        self.with_g_factors(g)
    }

    pub fn with_bond_strength(&self, j_max_mev: f64) -> Result<Self> {
        let bonds = self.bonds.iter().map(|b| Bond { j_max_mev, ..*b }).collect();
        Self::new(self.g_factors.clone(), self.field_b, bonds, self.layout)
    }

    /// Two-spin device holding only logical qubit `q`.
    pub fn qubit_subdevice(&self, q: usize) -> Result<Self> {
        let (i, j) = self.pair(q);
        let bond = self
            .bond(i, j)
            .copied()
            .ok_or_else(|| Error::InvalidDevice(format!("qubit {q} has no intra-pair bond")))?;
        Self::new(
            vec![self.g_factors[i - 1], self.g_factors[j - 1]],
            self.field_b,
            vec![Bond { i: 1, j: 2, ..bond }],
            Layout::Longitudinal1d,
        )
    }

    pub fn to_file(&self) -> DeviceFile {
        DeviceFile {
            n_spins: self.n_spins,
            g_factors: self.g_factors.clone(),
            field_tesla: self.field_b,
            bonds: self.bonds.iter().map(|b| (b.i, b.j, b.j_max_mev)).collect(),
            layout: self.layout,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: DeviceFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.into_config()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: DeviceFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.into_config()
    }

    /// Loads a `.toml` or `.json` device file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }
}

pub const SI_GE_DELTA_G: f64 = 0.435;
pub const SI_GE_FIELD_TESLA: f64 = 2.0;
pub const SI_GE_G1: f64 = 1.565;

/// On-disk device description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceFile {
    pub n_spins: usize,
    pub g_factors: Vec<f64>,
    pub field_tesla: f64,
    /// `[i, j, j_max_mev]` triples.
    pub bonds: Vec<(usize, usize, f64)>,
    #[serde(default = "default_layout")]
    pub layout: Layout,
}

fn default_layout() -> Layout {
    Layout::Custom
}

impl DeviceFile {
    pub fn into_config(self) -> Result<DeviceConfig> {
        if self.g_factors.len() != self.n_spins {
            return Err(Error::InvalidDevice(format!(
                "n_spins = {} but {} g-factors given",
                self.n_spins,
                self.g_factors.len()
            )));
        }
        let bonds = self
            .bonds
            .into_iter()
            .map(|(i, j, j_max_mev)| Bond { i, j, j_max_mev })
            .collect();
        DeviceConfig::new(self.g_factors, self.field_tesla, bonds, self.layout)
    }
}

fn check_spin(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::SpinIndex { index: i, n_spins: n });
    }
    Ok(())
}

/// `I ⊗ … ⊗ σ^α/2 ⊗ … ⊗ I` with the half-Pauli at slot `i`.
pub fn spin_operator(n: usize, i: usize, axis: SpinAxis) -> Result<ComplexMatrix> {
    check_spin(n, i)?;
    let left = ComplexMatrix::identity(1 << (i - 1));
    let right = ComplexMatrix::identity(1 << (n - i));
    Ok(kron(&kron(&left, &axis.half_pauli()), &right))
}

/// `S_i · S_j` (exchange with `J = 1`).
pub fn heisenberg(n: usize, i: usize, j: usize) -> Result<ComplexMatrix> {
    check_spin(n, i)?;
    check_spin(n, j)?;
    if i == j {
        return Err(Error::SameSpin(i));
    }
    let mut h = ComplexMatrix::zeros(1 << n);
    for axis in SpinAxis::ALL {
        h = h + &spin_operator(n, i, axis)? * &spin_operator(n, j, axis)?;
    }
    Ok(h)
}

/// `m` eigenvalue (`+1/2` for bit 0) of spin `i` in computational state `index`.
pub(crate) fn spin_projection(n: usize, index: usize, i: usize) -> f64 {
    if (index >> (n - i)) & 1 == 0 {
        0.5
    } else {
        -0.5
    }
}

/// `Σ_i g_i · B · S_iᶻ`.
pub fn zeeman(config: &DeviceConfig) -> ComplexMatrix {
    let n = config.n_spins;
    let diag: Vec<f64> = (0..1usize << n)
        .map(|k| {
            (1..=n)
                .map(|i| config.g_factors[i - 1] * config.field_b * spin_projection(n, k, i))
                .sum()
        })
        .collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// Total `Sᶻ = Σ_i S_iᶻ`.
pub fn total_sz(n: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..1usize << n)
        .map(|k| (1..=n).map(|i| spin_projection(n, k, i)).sum())
        .collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// `exp(−iθ S_i·S_j)`.
pub fn exchange_gate(n: usize, i: usize, j: usize, theta: f64) -> Result<ComplexMatrix> {
    expm_hermitian(&heisenberg(n, i, j)?, theta)
}

/// `exp(−iθ S_i^α)`: rotation of spin `i` by `θ` about `α`.
pub fn rotation_gate(n: usize, i: usize, axis: SpinAxis, theta: f64) -> Result<ComplexMatrix> {
    expm_hermitian(&spin_operator(n, i, axis)?, theta)
}

/// Permutation matrix exchanging spins `i` and `j`.
pub fn swap_operator(n: usize, i: usize, j: usize) -> Result<ComplexMatrix> {
    check_spin(n, i)?;
    check_spin(n, j)?;
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim).into_dmatrix();
    for k in 0..dim {
        let bi = (k >> (n - i)) & 1;
        let bj = (k >> (n - j)) & 1;
        let mut target = k & !(1 << (n - i)) & !(1 << (n - j));
        target |= bj << (n - i);
        target |= bi << (n - j);
        m[(target, k)] = c64(1.0, 0.0);
    }
    ComplexMatrix::from_dmatrix(m)
}
