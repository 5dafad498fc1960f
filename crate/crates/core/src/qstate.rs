//! Dense complex linear algebra over qubit registers.
//!
//! Qubit 0 is always the most significant tensor factor, so in an `N`-qubit
//! basis index qubit `q` occupies bit `N - 1 - q`. With the probe as qubit 0,
//! every controlled block `|0><0| ⊗ 1 + |1><1| ⊗ W` is literally block
//! diagonal.

use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest register handled by the dense backend unless a caller asks otherwise.
pub const DEFAULT_MAX_QUBITS: usize = 12;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-12;
pub const KRAUS_TOL: f64 = 1e-12;
/// Largest imaginary residue tolerated in `Re tr(O ρ)`.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn qubits_for(rows: usize, cols: usize) -> Result<usize> {
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 || !rows.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(rows));
    }
    Ok(rows.trailing_zeros() as usize)
}

/// Largest entrywise modulus of `m`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn max_abs_diff_matrix(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

fn hermiticity(m: &CMatrix) -> f64 {
    max_abs_diff_matrix(m, &m.adjoint())
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut eigs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// A square operator on a register of qubits (gate, controlled block, observable).
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    qubits: usize,
    matrix: CMatrix,
}

impl OperatorMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let qubits = qubits_for(matrix.nrows(), matrix.ncols())?;
        Ok(Self { qubits, matrix })
    }

    /// Checked constructor requiring `U†U = 1` within [`UNITARY_TOL`].
    pub fn unitary(matrix: CMatrix) -> Result<Self> {
        let op = Self::new(matrix)?;
        op.check_unitary()?;
        Ok(op)
    }

    pub fn identity(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        Self {
            qubits,
            matrix: CMatrix::identity(dim, dim),
        }
    }

    /// Row-major constructor for small literal matrices.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(CMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            qubits: self.qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `tr(U) / dim`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.trace() / self.dim() as f64
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            qubits: self.qubits,
            matrix: &self.matrix * factor,
        }
    }

    /// Max entrywise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let dim = self.dim();
        max_abs_diff_matrix(
            &(self.matrix.adjoint() * &self.matrix),
            &CMatrix::identity(dim, dim),
        )
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() <= UNITARY_TOL
    }

    pub fn check_unitary(&self) -> Result<()> {
        let err = self.unitarity_error();
        if err > UNITARY_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(())
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity(&self.matrix)
    }

    /// Max entrywise distance; infinite when the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff_matrix(&self.matrix, &other.matrix)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        Ok(Self {
            qubits: self.qubits,
            matrix: &self.matrix * &rhs.matrix,
        })
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    /// Panics on a dimension mismatch, like the underlying matrix product.
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_mul(rhs).expect("operator dimensions must agree")
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validating constructor.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Skips the Hermiticity, trace and spectrum checks. Used for outputs of
    /// maps that preserve them by construction.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Result<Self> {
        let qubits = qubits_for(matrix.nrows(), matrix.ncols())?;
        Ok(Self { qubits, matrix })
    }

    pub fn from_pure(state: &CVector) -> Result<Self> {
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state vector norm {norm}")));
        }
        Self::from_matrix_unchecked(state * state.adjoint())
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        Self {
            qubits,
            matrix: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    /// The computational basis projector `|index><index|`.
    pub fn basis_state(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {qubits} qubits"
            )));
        }
        let mut matrix = CMatrix::zeros(dim, dim);
        matrix[(index, index)] = ONE;
        Ok(Self { qubits, matrix })
    }

    /// Single-qubit state `(1 + r·σ)/2` for a Bloch vector with `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!("Bloch vector length {len} > 1")));
        }
        let half = 0.5;
        let matrix = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(half * (1.0 + r[2]), 0.0),
                Complex64::new(half * r[0], -half * r[1]),
                Complex64::new(half * r[0], half * r[1]),
                Complex64::new(half * (1.0 - r[2]), 0.0),
            ],
        );
        Ok(Self { qubits: 1, matrix })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity(&self.matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.matrix.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff_matrix(&self.matrix, &other.matrix)
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity(&self.matrix)
    }
}

/// Kronecker products of registers, with the left operand as the more
/// significant factor.
pub trait Tensor: Sized {
    fn tensor_with_limit(&self, other: &Self, max_qubits: usize) -> Result<Self>;
}

impl Tensor for OperatorMatrix {
    fn tensor_with_limit(&self, other: &Self, max_qubits: usize) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        if qubits > max_qubits {
            return Err(Error::TooManyQubits {
                requested: qubits,
                max: max_qubits,
            });
        }
        Ok(Self {
            qubits,
            matrix: kron(&self.matrix, &other.matrix),
        })
    }
}

impl Tensor for DensityMatrix {
    fn tensor_with_limit(&self, other: &Self, max_qubits: usize) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        if qubits > max_qubits {
            return Err(Error::TooManyQubits {
                requested: qubits,
                max: max_qubits,
            });
        }
        Ok(Self {
            qubits,
            matrix: kron(&self.matrix, &other.matrix),
        })
    }
}

/// `a ⊗ b` under [`DEFAULT_MAX_QUBITS`].
pub fn tensor<T: Tensor>(a: &T, b: &T) -> Result<T> {
    a.tensor_with_limit(b, DEFAULT_MAX_QUBITS)
}

/// Kraus operators of a CPTP map, all on the same register.
#[derive(Clone, Debug)]
pub struct KrausSet {
    qubits: usize,
    operators: Vec<OperatorMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<OperatorMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?;
        let (qubits, dim) = (first.qubits(), first.dim());
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &operators {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.dim(),
                });
            }
            sum += k.as_matrix().adjoint() * k.as_matrix();
        }
        let err = max_abs_diff_matrix(&sum, &CMatrix::identity(dim, dim));
        if err > KRAUS_TOL {
            return Err(Error::IncompleteKraus(err));
        }
        Ok(Self { qubits, operators })
    }

    /// Single-qubit depolarizing channel `ρ ↦ (1-p)ρ + p·1/2` in the form
    /// `{√(1-3p/4)·1, √(p/4)·σx, √(p/4)·σy, √(p/4)·σz}`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "depolarizing rate {p} outside [0, 1]"
            )));
        }
        let a = Complex64::new((1.0 - 0.75 * p).sqrt(), 0.0);
        let b = Complex64::new((0.25 * p).sqrt(), 0.0);
        let i = Complex64::new(0.0, 1.0);
        let ops = vec![
            OperatorMatrix::from_rows(2, &[a, ZERO, ZERO, a])?,
            OperatorMatrix::from_rows(2, &[ZERO, b, b, ZERO])?,
            OperatorMatrix::from_rows(2, &[ZERO, -i * b, i * b, ZERO])?,
            OperatorMatrix::from_rows(2, &[b, ZERO, ZERO, -b])?,
        ];
        Self::new(ops)
    }

    /// Mixture of Pauli conjugations `Σ w_i P_i ρ P_i` with `w = [w_I, w_X, w_Y, w_Z]`.
    pub fn pauli_mixture(weights: [f64; 4]) -> Result<Self> {
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidParameter("negative Pauli weight".into()));
        }
        let i = Complex64::new(0.0, 1.0);
        let paulis = [
            [ONE, ZERO, ZERO, ONE],
            [ZERO, ONE, ONE, ZERO],
            [ZERO, -i, i, ZERO],
            [ONE, ZERO, ZERO, -ONE],
        ];
        let ops = paulis
            .iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0.0)
            .map(|(p, w)| {
                let s = Complex64::new(w.sqrt(), 0.0);
                let scaled: Vec<Complex64> = p.iter().map(|z| z * s).collect();
                OperatorMatrix::from_rows(2, &scaled)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    /// Lift a single-qubit channel onto qubit `target` of a `total`-qubit register.
    pub fn embed(&self, target: usize, total: usize) -> Result<Self> {
        if target + self.qubits > total {
            return Err(Error::InvalidQubit {
                index: target,
                count: total,
            });
        }
        let left = OperatorMatrix::identity(target);
        let right = OperatorMatrix::identity(total - target - self.qubits);
        let operators = self
            .operators
            .iter()
            .map(|k| {
                left.tensor_with_limit(k, usize::MAX)
                    .and_then(|lk| lk.tensor_with_limit(&right, usize::MAX))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            qubits: total,
            operators,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn operators(&self) -> &[OperatorMatrix] {
        &self.operators
    }
}

/// `U ρ U†`.
pub fn apply_unitary(rho: &DensityMatrix, u: &OperatorMatrix) -> Result<DensityMatrix> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: u.dim(),
        });
    }
    u.check_unitary()?;
    let out = u.as_matrix() * rho.as_matrix() * u.as_matrix().adjoint();
    DensityMatrix::from_matrix_unchecked(out)
}

/// `Σ K ρ K†`.
pub fn apply_channel(rho: &DensityMatrix, kraus: &KrausSet) -> Result<DensityMatrix> {
    if rho.qubits() != kraus.qubits() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: 1 << kraus.qubits(),
        });
    }
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for k in kraus.operators() {
        out += k.as_matrix() * rho.as_matrix() * k.as_matrix().adjoint();
    }
    DensityMatrix::from_matrix_unchecked(out)
}

fn check_qubit(index: usize, count: usize) -> Result<()> {
    if index >= count {
        return Err(Error::InvalidQubit { index, count });
    }
    Ok(())
}

/// Scatter the bits of `value` into the register positions of `qubits`
/// (listed most significant first).
fn scatter(value: usize, qubits: &[usize], total: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
        let bit = (value >> (k - 1 - pos)) & 1;
        acc | (bit << (total - 1 - q))
    })
}

/// Reduced state on `keep`, which is read as a set; kept qubits stay in
/// ascending register order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let total = rho.qubits();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    for &q in &kept {
        check_qubit(q, total)?;
    }
    let traced: Vec<usize> = (0..total).filter(|q| !kept.contains(q)).collect();

    let out_dim = 1usize << kept.len();
    let env_dim = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..out_dim).map(|i| scatter(i, &kept, total)).collect();
    let env_idx: Vec<usize> = (0..env_dim).map(|e| scatter(e, &traced, total)).collect();

    let m = rho.as_matrix();
    let out = CMatrix::from_fn(out_dim, out_dim, |i, j| {
        env_idx
            .iter()
            .map(|&e| m[(kept_idx[i] | e, kept_idx[j] | e)])
            .sum()
    });
    DensityMatrix::from_matrix_unchecked(out)
}

/// Transpose on the single qubit `qubit`; the result need not be a state.
pub fn partial_transpose(rho: &DensityMatrix, qubit: usize) -> Result<CMatrix> {
    check_qubit(qubit, rho.qubits())?;
    let mask = 1usize << (rho.qubits() - 1 - qubit);
    let m = rho.as_matrix();
    Ok(CMatrix::from_fn(rho.dim(), rho.dim(), |r, c| {
        // swap the chosen qubit's bit between row and column
        let (rb, cb) = (r & mask, c & mask);
        m[((r & !mask) | cb, (c & !mask) | rb)]
    }))
}

/// Shannon entropy in bits of a spectrum, each value clipped to `[0, 1]`.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum()
}

/// `-tr(ρ log2 ρ)` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    spectrum_entropy(&rho.eigenvalues())
}

/// `Re tr(O ρ)` for a Hermitian observable.
pub fn expectation(rho: &DensityMatrix, obs: &OperatorMatrix) -> Result<f64> {
    if rho.dim() != obs.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: obs.dim(),
        });
    }
    let herm = obs.hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(Error::NotHermitian(herm));
    }
    // tr(OA) = Σ_ij O_ij A_ji without forming the product
    let (o, r) = (obs.as_matrix(), rho.as_matrix());
    let dim = rho.dim();
    let mut value = ZERO;
    for i in 0..dim {
        for j in 0..dim {
            value += o[(i, j)] * r[(j, i)];
        }
    }
    if value.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(Error::Invariant(format!(
            "expectation has imaginary residue {:e}",
            value.im
        )));
    }
    Ok(value.re)
}
