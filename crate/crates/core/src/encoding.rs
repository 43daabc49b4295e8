//! Decoherence-free subspaces, encoded qubit bases and leakage.
//!
//! A logical qubit is the `Sᶻ = 0` sector of a spin pair `(i, j)`:
//! `|0⟩_Q = |01⟩` and `|1⟩_Q = |10⟩` on those two spins. Logical operators
//! use spin-1/2 normalization, `Σ^A = σ^A / 2`. Multi-qubit product bases are
//! ordered with the first listed qubit most significant.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{c64, restrict, spectral_norm, ComplexMatrix, C64};
use crate::spin::{heisenberg, zeeman, DeviceConfig, SpinAxis};

const ORTHONORMAL_TOL: f64 = 1e-12;
/// Off-block norm below which an operator counts as preserving a subspace.
pub const LEAKAGE_TOL: f64 = 1e-12;

pub fn label_to_index(label: &str) -> Result<usize> {
    let mut index = 0usize;
    for ch in label.chars() {
        index <<= 1;
        match ch {
            '0' => {}
            '1' => index |= 1,
            _ => {
                return Err(Error::InvalidLabel {
                    label: label.to_string(),
                    reason: format!("unexpected character {ch:?}"),
                })
            }
        }
    }
    Ok(index)
}

pub fn index_to_label(index: usize, n: usize) -> String {
    (1..=n)
        .map(|i| if (index >> (n - i)) & 1 == 0 { '0' } else { '1' })
        .collect()
}

/// Ordered orthonormal basis of a subspace of an `n`-spin register.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    n_spins: usize,
    labels: Vec<String>,
    vectors: DMatrix<C64>,
}

impl SubspaceBasis {
    /// Basis of computational states.
    pub fn from_labels(n_spins: usize, labels: Vec<String>) -> Result<Self> {
        let dim = 1usize << n_spins;
        let mut vectors = DMatrix::zeros(dim, labels.len());
        for (col, label) in labels.iter().enumerate() {
            if label.len() != n_spins {
                return Err(Error::InvalidLabel {
                    label: label.clone(),
                    reason: format!("expected {n_spins} bits"),
                });
            }
            vectors[(label_to_index(label)?, col)] = c64(1.0, 0.0);
        }
        Self::from_vectors(n_spins, labels, vectors)
    }

    /// General basis; the columns of `vectors` must be orthonormal.
    pub fn from_vectors(n_spins: usize, labels: Vec<String>, vectors: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << n_spins;
        if vectors.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: vectors.nrows(),
            });
        }
        if labels.len() != vectors.ncols() {
            return Err(Error::DimensionMismatch {
                expected: vectors.ncols(),
                found: labels.len(),
            });
        }
        let gram = vectors.adjoint() * &vectors;
        let k = vectors.ncols();
        let deviation = ComplexMatrix::from_dmatrix(gram)?.max_abs_diff(&ComplexMatrix::identity(k));
        if deviation > ORTHONORMAL_TOL {
            return Err(Error::NonOrthonormal { deviation });
        }
        Ok(Self {
            n_spins,
            labels,
            vectors,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Basis vectors as columns.
    pub fn vectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.vectors * self.vectors.adjoint()).expect("square by construction")
    }

    pub fn restrict(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        restrict(op, self)
    }
}

/// `DFS_c(m)`: all `c`-bit labels with `(#zeros − #ones)/2 = m`, in
/// lexicographic order.
pub fn dfs_basis(c: usize, m: f64) -> Result<SubspaceBasis> {
    let invalid = || Error::InvalidSector { c, m };
    let two_m = 2.0 * m;
    if c == 0 || two_m.fract() != 0.0 || two_m.abs() > c as f64 {
        return Err(invalid());
    }
    let two_m = two_m as i64;
    if (c as i64 - two_m) % 2 != 0 {
        return Err(invalid());
    }
    let ones = ((c as i64 - two_m) / 2) as u32;
    let labels = (0..1usize << c)
        .filter(|k| k.count_ones() == ones)
        .map(|k| index_to_label(k, c))
        .collect();
    SubspaceBasis::from_labels(c, labels)
}

fn check_pair(n: usize, (i, j): (usize, usize)) -> Result<()> {
    for s in [i, j] {
        if s == 0 || s > n {
            return Err(Error::SpinIndex { index: s, n_spins: n });
        }
    }
    if i >= j {
        return Err(Error::InvalidLabel {
            label: format!("({i}, {j})"),
            reason: "pair must satisfy i < j".into(),
        });
    }
    Ok(())
}

/// `{|0⟩_Q, |1⟩_Q}` of the pair in an `n`-spin register; spins outside the
/// pair are held in `|0⟩`.
pub fn logical_qubit_basis(n: usize, pair: (usize, usize)) -> Result<SubspaceBasis> {
    logical_product_basis(n, &[pair])
}

/// Tensor products of per-pair logical states, `|0…0⟩_Q` first, first pair
/// most significant. Spins outside every pair are held in `|0⟩`.
pub fn logical_product_basis(n: usize, pairs: &[(usize, usize)]) -> Result<SubspaceBasis> {
    let mut used = vec![false; n + 1];
    for &pair in pairs {
        check_pair(n, pair)?;
        for s in [pair.0, pair.1] {
            if used[s] {
                return Err(Error::InvalidLabel {
                    label: format!("{pairs:?}"),
                    reason: format!("spin {s} appears in two pairs"),
                });
            }
            used[s] = true;
        }
    }
    let k = pairs.len();
    let labels = (0..1usize << k)
        .map(|logical| {
            let mut bits = vec!['0'; n];
            for (q, &(i, j)) in pairs.iter().enumerate() {
                let one = (logical >> (k - 1 - q)) & 1 == 1;
                // |0⟩_Q = |01⟩, |1⟩_Q = |10⟩
                bits[i - 1] = if one { '1' } else { '0' };
                bits[j - 1] = if one { '0' } else { '1' };
            }
            bits.into_iter().collect()
        })
        .collect();
    SubspaceBasis::from_labels(n, labels)
}

/// Logical product basis of every pair `(2q+1, 2q+2)` in an `n`-spin register.
pub fn consecutive_pairs_basis(n: usize) -> Result<SubspaceBasis> {
    let pairs: Vec<_> = (0..n / 2).map(|q| (2 * q + 1, 2 * q + 2)).collect();
    logical_product_basis(n, &pairs)
}

/// Coefficients of a 2×2 operator in the basis `{I, Σˣ, Σʸ, Σᶻ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalComponents {
    pub identity: C64,
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl LogicalComponents {
    pub fn of(op: &ComplexMatrix) -> Result<Self> {
        if op.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: op.dim(),
            });
        }
        let (a, b, c, d) = (op.get(0, 0), op.get(0, 1), op.get(1, 0), op.get(1, 1));
        Ok(Self {
            identity: (a + d) * 0.5,
            x: b + c,
            y: (b - c) * c64(0.0, 1.0),
            z: a - d,
        })
    }

    pub fn axis(&self, axis: SpinAxis) -> C64 {
        match axis {
            SpinAxis::X => self.x,
            SpinAxis::Y => self.y,
            SpinAxis::Z => self.z,
        }
    }
}

/// The three logical spin operators (half-Pauli normalization).
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalOperatorSet {
    pub sigma_x: ComplexMatrix,
    pub sigma_y: ComplexMatrix,
    pub sigma_z: ComplexMatrix,
}

impl LogicalOperatorSet {
    pub fn new() -> Self {
        Self {
            sigma_x: SpinAxis::X.half_pauli(),
            sigma_y: SpinAxis::Y.half_pauli(),
            sigma_z: SpinAxis::Z.half_pauli(),
        }
    }

    pub fn get(&self, axis: SpinAxis) -> &ComplexMatrix {
        match axis {
            SpinAxis::X => &self.sigma_x,
            SpinAxis::Y => &self.sigma_y,
            SpinAxis::Z => &self.sigma_z,
        }
    }
}

impl Default for LogicalOperatorSet {
    fn default() -> Self {
        Self::new()
    }
}

/// `restrict(op) = coefficient · Σ^axis + identity_shift · I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalDecomposition {
    /// `None` when the restriction is a pure multiple of the identity.
    pub axis: Option<SpinAxis>,
    pub coefficient: f64,
    pub identity_shift: f64,
}

impl LogicalDecomposition {
    pub fn logical(&self) -> ComplexMatrix {
        match self.axis {
            Some(axis) => axis.half_pauli(),
            None => ComplexMatrix::zeros(2),
        }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.logical().scale_real(self.coefficient) + ComplexMatrix::identity(2).scale_real(self.identity_shift)
    }
}

/// Writes the restriction of a Hermitian operator to the pair's logical
/// qubit as a single logical axis plus an identity shift.
pub fn logical_operators_from_restriction(
    n: usize,
    pair: (usize, usize),
    op: &ComplexMatrix,
) -> Result<LogicalDecomposition> {
    let basis = logical_qubit_basis(n, pair)?;
    let leak = leakage(op, &basis)?;
    let scale = op.max_abs().max(1.0);
    if leak > LEAKAGE_TOL * scale {
        return Err(Error::Leaks { leakage: leak });
    }
    let restricted = basis.restrict(op)?;
    let parts = LogicalComponents::of(&restricted)?;
    let tol = 1e-12 * scale;
    if parts.identity.im.abs() > tol || parts.x.im.abs() > tol || parts.y.im.abs() > tol || parts.z.im.abs() > tol {
        return Err(Error::NotHermitian {
            deviation: restricted.hermiticity_deviation(),
        });
    }
    let active: Vec<SpinAxis> = SpinAxis::ALL
        .into_iter()
        .filter(|&a| parts.axis(a).re.abs() > tol)
        .collect();
    match active.as_slice() {
        [] => Ok(LogicalDecomposition {
            axis: None,
            coefficient: 0.0,
            identity_shift: parts.identity.re,
        }),
        [axis] => Ok(LogicalDecomposition {
            axis: Some(*axis),
            coefficient: parts.axis(*axis).re,
            identity_shift: parts.identity.re,
        }),
        _ => Err(Error::NotSingleAxis),
    }
}

/// Operator 2-norm of `(I − P)·u·P` for the projector `P` onto `basis`.
pub fn leakage(u: &ComplexMatrix, basis: &SubspaceBasis) -> Result<f64> {
    let b = basis.vectors();
    if b.nrows() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.nrows(),
            found: u.dim(),
        });
    }
    let ub = u.as_dmatrix() * b;
    let inside = b * (b.adjoint() * &ub);
    Ok(spectral_norm(&(ub - inside)))
}

/// Out-of-space components of `S_i·S_j |label⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeakageWitness {
    /// Components outside the logical product space, largest magnitude first.
    pub components: Vec<(String, C64)>,
}

impl LeakageWitness {
    /// Dominant out-of-space component; `None` when nothing leaks.
    pub fn dominant(&self) -> Option<(&str, C64)> {
        self.components.first().map(|(l, a)| (l.as_str(), *a))
    }

    pub fn out_label(&self) -> Option<&str> {
        self.dominant().map(|(l, _)| l)
    }

    /// Amplitude of the dominant component (zero when nothing leaks).
    pub fn amplitude(&self) -> C64 {
        self.dominant().map(|(_, a)| a).unwrap_or_default()
    }
}

/// Applies the exchange of `bond` to a computational state and lists what
/// lands outside the logical product space of consecutive pairs.
pub fn leakage_witness(bond: (usize, usize), state_label: &str) -> Result<LeakageWitness> {
    let n = state_label.len();
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidLabel {
            label: state_label.to_string(),
            reason: "needs an even number of spins".into(),
        });
    }
    let index = label_to_index(state_label)?;
    let h = heisenberg(n, bond.0, bond.1)?;
    let product = consecutive_pairs_basis(n)?;
    let mut components: Vec<(String, C64)> = (0..1usize << n)
        .filter_map(|row| {
            let amp = h.get(row, index);
            let label = index_to_label(row, n);
            (amp.norm() > 1e-14 && !product.contains_label(&label)).then_some((label, amp))
        })
        .collect();
    components.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()).then_with(|| a.0.cmp(&b.0)));
    Ok(LeakageWitness { components })
}

/// Effective logical field of a single pair: `h_x Σˣ + h_z Σᶻ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveField {
    /// Exchange-induced X component.
    pub h_x: f64,
    /// Zeeman-induced Z component, `(g₁ − g₂)·B` with `|0⟩_Q = |01⟩`.
    pub h_z: f64,
}

impl EffectiveField {
    pub fn magnitude(&self) -> f64 {
        self.h_x.hypot(self.h_z)
    }

    /// Angle of the field away from the Z axis, a rotation about Y.
    pub fn tilt(&self) -> f64 {
        self.h_x.atan2(self.h_z)
    }
}

/// Reads the logical field off the restriction of
/// `zeeman + j_intra · S₁·S₂` for a pair with g-factors `(g1, g2)`.
pub fn effective_qubit_field(g1: f64, g2: f64, b: f64, j_intra: f64) -> Result<EffectiveField> {
    let device = DeviceConfig::single_qubit(g1, g2, b);
    let h = zeeman(&device) + heisenberg(2, 1, 2)?.scale_real(j_intra);
    let basis = logical_qubit_basis(2, (1, 2))?;
    let parts = LogicalComponents::of(&basis.restrict(&h)?)?;
    Ok(EffectiveField {
        h_x: parts.x.re,
        h_z: parts.z.re,
    })
}

/// Coefficient of `Σᶻ` in the Zeeman restriction of logical qubit `q`.
pub fn logical_z_coefficient(device: &DeviceConfig, q: usize) -> f64 {
    let (i, j) = device.pair(q);
    (device.g_factors()[i - 1] - device.g_factors()[j - 1]) * device.field_b()
}
