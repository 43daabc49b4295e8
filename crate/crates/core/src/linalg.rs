//! Dense complex linear algebra for small registers.
//!
//! Every operator in the crate is a [`ComplexMatrix`]: a square, dense
//! matrix of `Complex<f64>`. Register dimensions stay at or below a few
//! hundred, so all exponentials are taken exactly through a Hermitian
//! eigendecomposition rather than a series or Padé approximant.
//!
//! Tensor ordering: spin 1 is the most significant factor, so the
//! computational label `b1 b2 ... bn` lives at index `sum_i b_i 2^(n-i)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::encoding::SubspaceBasis;
use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Tolerance for Hermiticity checks on generator inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance used for algebraic identities between operators.
pub const IDENTITY_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Wraps a nalgebra matrix, rejecting non-square input.
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(Self(m))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds a matrix from entries listed row by row.
    ///
    /// Panics if `entries.len() != dim * dim`.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Self {
        Self(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(
            diag.len(),
            |r, c| if r == c { c64(diag[r], 0.0) } else { C64::default() },
        )
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.0.diagonal().iter().copied().collect()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// Operator 2-norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        spectral_norm(&self.0)
    }

    /// `max |M − M†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        let n = self.dim();
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self.0[(r, c)] - self.0[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `max |U†U − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.0.adjoint() * &self.0;
        Self(p).max_abs_diff(&Self::identity(self.dim()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::identity(self.dim());
        for _ in 0..exponent {
            out = &out * self;
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.0[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

/// Largest singular value of a (possibly rectangular) complex matrix.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Kronecker product with `a` as the more significant factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Eigendecomposition of a Hermitian matrix, reusable for propagators at
/// several angles.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    values: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        let deviation = h.hermiticity_deviation();
        if deviation > HERMITIAN_TOL * h.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::new_unchecked(h))
    }

    fn new_unchecked(h: &ComplexMatrix) -> Self {
        // Symmetrize so round-off in the input cannot leak into the eigenvectors.
        let sym = (&h.0 + h.0.adjoint()) * c64(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.values.as_slice()
    }

    /// `exp(−i·theta·H)`.
    pub fn propagator(&self, theta: f64) -> ComplexMatrix {
        let phases: Vec<C64> = self
            .values
            .iter()
            .map(|&lambda| C64::from_polar(1.0, -theta * lambda))
            .collect();
        let mut scaled = self.vectors.clone();
        for (col, phase) in phases.iter().enumerate() {
            let mut column = scaled.column_mut(col);
            column *= *phase;
        }
        ComplexMatrix(scaled * self.vectors.adjoint())
    }
}

/// `exp(−i·theta·h)` for Hermitian `h`, computed by eigendecomposition.
pub fn expm_hermitian(h: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    if theta == 0.0 {
        let deviation = h.hermiticity_deviation();
        if deviation > HERMITIAN_TOL * h.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        return Ok(ComplexMatrix::identity(h.dim()));
    }
    Ok(HermitianEigen::new(h)?.propagator(theta))
}

/// Result of comparing two unitaries up to a global phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// `|tr(u†v)| / dim`.
    pub fidelity: f64,
    /// `tr(u†v) / |tr(u†v)|`, so that `v ≈ global_phase · u`. `None` when the
    /// overlap vanishes.
    pub global_phase: Option<C64>,
    /// `max |v − global_phase·u|` over all entries.
    pub max_entry_deviation: f64,
}

impl EquivalenceReport {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

pub fn compare_up_to_global_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<EquivalenceReport> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let overlap: C64 = u.0.iter().zip(v.0.iter()).map(|(a, b)| a.conj() * b).sum();
    let magnitude = overlap.norm();
    let fidelity = (magnitude / u.dim() as f64).min(1.0);
    let global_phase = (magnitude > 1e-14).then(|| overlap / magnitude);
    let phase = global_phase.unwrap_or(C64::new(1.0, 0.0));
    let max_entry_deviation =
        u.0.iter()
            .zip(v.0.iter())
            .fold(0.0_f64, |acc, (a, b)| acc.max((b - phase * a).norm()));
    Ok(EquivalenceReport {
        fidelity,
        global_phase,
        max_entry_deviation,
    })
}

/// `B† op B`, where `B` stacks the basis vectors as columns.
pub fn restrict(op: &ComplexMatrix, basis: &SubspaceBasis) -> Result<ComplexMatrix> {
    let b = basis.vectors();
    if b.nrows() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.nrows(),
            found: op.dim(),
        });
    }
    Ok(ComplexMatrix(b.adjoint() * &op.0 * b))
}

/// Half-Pauli (spin-1/2) matrices.
pub fn half_pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, &[c64(0.0, 0.0), c64(0.5, 0.0), c64(0.5, 0.0), c64(0.0, 0.0)])
}

pub fn half_pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, &[c64(0.0, 0.0), c64(0.0, -0.5), c64(0.0, 0.5), c64(0.0, 0.0)])
}

pub fn half_pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[0.5, -0.5])
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut a = angle.rem_euclid(two_pi);
    if a > std::f64::consts::PI {
        a -= two_pi;
    }
    a
}
