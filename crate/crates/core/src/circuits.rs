//! Gates and composite operators for the parity-learning circuits.
//!
//! Full registers put the probe at qubit 0 and data qubit `k` (0-based) at
//! register qubit `k + 1`. Operators acting only on the data register number
//! data qubits `0..n` from left to right.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{CMatrix, CVector, OperatorMatrix, Tensor, DEFAULT_MAX_QUBITS};

pub type Mat2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance for the exact operator identities checked in this module.
pub const IDENTITY_TOL: f64 = 1e-12;

/// A hidden string `s` or a query input `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidBits("bit string must have length >= 1".into()));
        }
        Ok(Self { bits })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![false; n])
    }

    /// Big-endian: the first bit is the most significant bit of `value`.
    pub fn from_index(n: usize, value: u64) -> Result<Self> {
        if n == 0 || n > 64 || (n < 64 && value >> n != 0) {
            return Err(Error::InvalidBits(format!(
                "value {value} does not fit in {n} bits"
            )));
        }
        Self::new((0..n).map(|k| (value >> (n - 1 - k)) & 1 == 1).collect())
    }

    /// Inverse of [`BitString::from_index`]; requires `len() <= 64`.
    pub fn index(&self) -> u64 {
        assert!(self.len() <= 64, "bit string too long for a u64 index");
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    /// All `2^n` strings in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = BitString> {
        assert!((1..=20).contains(&n), "enumeration limited to 1..=20 bits");
        (0..1u64 << n).map(move |v| BitString::from_index(n, v).expect("in range"))
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..n).map(|_| rng.random::<bool>()).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_zero(&self) -> bool {
        self.weight() == 0
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(k, _)| k)
    }

    pub fn with_bit(&self, k: usize, value: bool) -> Self {
        let mut out = self.clone();
        out.bits[k] = value;
        out
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Self::new(
            self.bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        )
    }

    /// `Σ s_k x_k mod 2`.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .fold(false, |acc, (a, b)| acc ^ (a & b)))
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBits(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn identity2() -> Mat2 {
    Mat2::identity()
}

pub fn pauli_x2() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y2() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z2() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn hadamard2() -> Mat2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Mat2::new(h, h, h, -h)
}

/// `exp(iθ(cos φ σx + sin φ σy)/2)`; `φ = 0` is the plain `R_x(θ) = exp(iθσx/2)`.
pub fn rotation2(theta: f64, phi: f64) -> Mat2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let axis = pauli_x2() * Complex64::new(phi.cos(), 0.0) + pauli_y2() * Complex64::new(phi.sin(), 0.0);
    identity2() * Complex64::new(c, 0.0) + axis * Complex64::new(0.0, s)
}

pub fn rx2(theta: f64) -> Mat2 {
    rotation2(theta, 0.0)
}

fn op2(m: &Mat2) -> OperatorMatrix {
    OperatorMatrix::new(CMatrix::from_iterator(2, 2, m.iter().copied())).expect("2x2 is a qubit operator")
}

pub fn pauli_x() -> OperatorMatrix {
    op2(&pauli_x2())
}

pub fn pauli_y() -> OperatorMatrix {
    op2(&pauli_y2())
}

pub fn pauli_z() -> OperatorMatrix {
    op2(&pauli_z2())
}

pub fn hadamard() -> OperatorMatrix {
    op2(&hadamard2())
}

/// Single-qubit `op` on `target` of a `total`-qubit register.
pub fn embed(op: &Mat2, target: usize, total: usize) -> Result<OperatorMatrix> {
    if target >= total {
        return Err(Error::InvalidQubit {
            index: target,
            count: total,
        });
    }
    OperatorMatrix::identity(target)
        .tensor_with_limit(&op2(op), DEFAULT_MAX_QUBITS)?
        .tensor_with_limit(&OperatorMatrix::identity(total - target - 1), DEFAULT_MAX_QUBITS)
}

/// `H` on every qubit of the register.
pub fn hadamard_all(total: usize) -> Result<OperatorMatrix> {
    ProductOperator::new(vec![hadamard2(); total])?.to_operator()
}

/// Controlled-NOT as a basis permutation.
pub fn cnot(control: usize, target: usize, total: usize) -> Result<OperatorMatrix> {
    for q in [control, target] {
        if q >= total {
            return Err(Error::InvalidQubit { index: q, count: total });
        }
    }
    if control == target {
        return Err(Error::InvalidParameter("CNOT control equals target".into()));
    }
    if total > DEFAULT_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: total,
            max: DEFAULT_MAX_QUBITS,
        });
    }
    let dim = 1usize << total;
    let cmask = 1usize << (total - 1 - control);
    let tmask = 1usize << (total - 1 - target);
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let row = if col & cmask != 0 { col ^ tmask } else { col };
        m[(row, col)] = ONE;
    }
    OperatorMatrix::new(m)
}

/// A tensor product of single-qubit factors, factor `k` acting on data qubit `k`.
///
/// Every operator the learner and the hidden function apply has this form,
/// which is what makes the closed-form trace backend possible.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductOperator {
    factors: Vec<Mat2>,
}

impl ProductOperator {
    pub fn new(factors: Vec<Mat2>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("product operator needs at least one factor".into()));
        }
        Ok(Self { factors })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(vec![identity2(); n])
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Mat2] {
        &self.factors
    }

    /// `Π_k tr(F_k)/2`, i.e. `tr(F)/2^n` without forming `F`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.factors.iter().map(|f| f.trace() * 0.5).product()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            factors: self.factors.iter().map(|f| f.adjoint()).collect(),
        }
    }

    /// Dense Kronecker expansion.
    pub fn to_operator(&self) -> Result<OperatorMatrix> {
        if self.len() > DEFAULT_MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: self.len(),
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let mut it = self.factors.iter();
        let first = op2(it.next().expect("non-empty"));
        it.try_fold(first, |acc, f| acc.tensor_with_limit(&op2(f), DEFAULT_MAX_QUBITS))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: rhs.len(),
            });
        }
        Ok(Self {
            factors: self
                .factors
                .iter()
                .zip(&rhs.factors)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }
}

impl Mul for &ProductOperator {
    type Output = ProductOperator;

    fn mul(self, rhs: &ProductOperator) -> ProductOperator {
        self.try_mul(rhs).expect("product operators must have equal length")
    }
}

/// `U_s = ⊗_k σx^{s_k}` as a product.
pub fn parity_product(s: &BitString) -> ProductOperator {
    ProductOperator {
        factors: s
            .bits()
            .iter()
            .map(|&b| if b { pauli_x2() } else { identity2() })
            .collect(),
    }
}

/// Dense `U_s = ⊗_k σx^{s_k}`.
pub fn build_parity_unitary(s: &BitString) -> Result<OperatorMatrix> {
    parity_product(s).to_operator()
}

/// Which data qubits a controlled rotation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum RotationShape {
    /// Every data qubit.
    Uniform,
    /// Every data qubit, then the inverse rotation on this one.
    Excluding(usize),
    /// Only data qubits with index greater than this one.
    TailFrom(usize),
}

/// A controlled-rotation family member: angle, axis tilt, and shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    pub theta: f64,
    /// Tilt of the rotation axis from x̂ towards ŷ.
    pub phi: f64,
    pub shape: RotationShape,
}

impl RotationSpec {
    pub fn uniform(theta: f64) -> Self {
        Self {
            theta,
            phi: 0.0,
            shape: RotationShape::Uniform,
        }
    }

    pub fn excluding(theta: f64, j: usize) -> Self {
        Self {
            theta,
            phi: 0.0,
            shape: RotationShape::Excluding(j),
        }
    }

    pub fn tail_from(theta: f64, j: usize) -> Self {
        Self {
            theta,
            phi: 0.0,
            shape: RotationShape::TailFrom(j),
        }
    }

    pub fn with_tilt(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }
}

/// Product form of a rotation spec on `n` data qubits.
pub fn rotation_product(spec: &RotationSpec, n: usize) -> Result<ProductOperator> {
    let r = rotation2(spec.theta, spec.phi);
    let factors = match spec.shape {
        RotationShape::Uniform => vec![r; n],
        RotationShape::Excluding(j) => {
            check_data_index(j, n)?;
            (0..n)
                .map(|k| if k == j { r.adjoint() * r } else { r })
                .collect()
        }
        RotationShape::TailFrom(j) => {
            check_data_index(j, n)?;
            (0..n).map(|k| if k > j { r } else { identity2() }).collect()
        }
    };
    ProductOperator::new(factors)
}

/// Rotation on an arbitrary subset of data qubits.
pub fn rotation_on(theta: f64, phi: f64, rotated: &[bool]) -> Result<ProductOperator> {
    let r = rotation2(theta, phi);
    ProductOperator::new(
        rotated
            .iter()
            .map(|&on| if on { r } else { identity2() })
            .collect(),
    )
}

pub fn build_rotation(spec: &RotationSpec, n: usize) -> Result<OperatorMatrix> {
    rotation_product(spec, n)?.to_operator()
}

pub(crate) fn check_data_index(j: usize, n: usize) -> Result<()> {
    if j >= n {
        return Err(Error::InvalidQubit { index: j, count: n });
    }
    Ok(())
}

/// `|0><0| ⊗ 1 + |1><1| ⊗ U` with the new control as the leading qubit.
pub fn controlled(u: &OperatorMatrix) -> Result<OperatorMatrix> {
    u.check_unitary()?;
    if u.qubits() + 1 > DEFAULT_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: u.qubits() + 1,
            max: DEFAULT_MAX_QUBITS,
        });
    }
    let d = u.dim();
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).fill_with_identity();
    m.view_mut((d, d), (d, d)).copy_from(u.as_matrix());
    OperatorMatrix::new(m)
}

/// CNOTs from each data qubit with `s_k = 1` onto the result qubit (qubit 0).
pub fn parity_oracle_network(s: &BitString) -> Result<OperatorMatrix> {
    let total = s.len() + 1;
    s.ones().try_fold(OperatorMatrix::identity(total), |acc, k| {
        Ok(&cnot(k + 1, 0, total)? * &acc)
    })
}

/// The oracle network conjugated by Hadamards on every qubit. With a
/// maximally mixed data register this is the trace-estimation circuit.
pub fn converted_parity_circuit(s: &BitString) -> Result<OperatorMatrix> {
    let h = hadamard_all(s.len() + 1)?;
    Ok(&(&h * &parity_oracle_network(s)?) * &h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseSign {
    Plus,
    Minus,
}

/// `(|0>|x> ± |1>|x⊕s>)/√2` on the result qubit plus data register.
pub fn lpn_pure_output(x: &BitString, s: &BitString, sign: PhaseSign) -> Result<CVector> {
    let flipped = x.xor(s)?;
    let n = x.len();
    if n + 1 > DEFAULT_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n + 1,
            max: DEFAULT_MAX_QUBITS,
        });
    }
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = CVector::zeros(1 << (n + 1));
    v[x.index() as usize] += Complex64::new(amp, 0.0);
    let lower = (1usize << n) | flipped.index() as usize;
    v[lower] += match sign {
        PhaseSign::Plus => Complex64::new(amp, 0.0),
        PhaseSign::Minus => Complex64::new(-amp, 0.0),
    };
    Ok(v)
}

/// Output of the noiseless oracle circuit on `|0>|0…0>`: Hadamards on the
/// data, the oracle network, then Hadamards on every qubit.
pub fn noiseless_oracle_output(s: &BitString) -> Result<CVector> {
    let total = s.len() + 1;
    let prep = OperatorMatrix::identity(1).tensor_with_limit(&hadamard_all(s.len())?, DEFAULT_MAX_QUBITS)?;
    let circuit = &(&hadamard_all(total)? * &parity_oracle_network(s)?) * &prep;
    let mut zero = CVector::zeros(1 << total);
    zero[0] = ONE;
    Ok(circuit.as_matrix() * zero)
}

/// Checks `(1⊗E)·CNOT·(H⊗1) = CNOT·(H⊗1)·(σx⊗σz)` on (probe, data), with the
/// CNOT controlled by the probe.
pub fn propagation_identity_holds(data_error: &OperatorMatrix) -> bool {
    let build = || -> Result<(OperatorMatrix, OperatorMatrix)> {
        let cx = cnot(0, 1, 2)?;
        let h1 = embed(&hadamard2(), 0, 2)?;
        let lhs = &(&OperatorMatrix::identity(1).tensor_with_limit(data_error, 2)? * &cx) * &h1;
        let xz = op2(&pauli_x2()).tensor_with_limit(&pauli_z(), 2)?;
        let rhs = &(&cx * &h1) * &xz;
        Ok((lhs, rhs))
    };
    match build() {
        Ok((lhs, rhs)) => lhs.max_abs_diff(&rhs) <= IDENTITY_TOL,
        Err(_) => false,
    }
}

/// A phase flip on the data after `H`-then-CNOT equals a bit flip on the probe
/// plus a phase flip on the data before it.
pub fn error_identity_check() -> bool {
    propagation_identity_holds(&pauli_z())
}

/// Simultaneous phase flips on two coupled data qubits send `X·X = 1` back to the probe.
pub fn double_phase_flip_cancels() -> bool {
    let build = || -> Result<bool> {
        let c = &cnot(0, 1, 3)? * &cnot(0, 2, 3)?;
        let h = embed(&hadamard2(), 0, 3)?;
        let zz = ProductOperator::new(vec![identity2(), pauli_z2(), pauli_z2()])?.to_operator()?;
        let lhs = &(&zz * &c) * &h;
        let rhs = &(&c * &h) * &zz;
        Ok(lhs.max_abs_diff(&rhs) <= IDENTITY_TOL)
    };
    build().unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{apply_unitary, DensityMatrix};

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bitstring_parse_and_display() {
        let s = b("0110");
        assert_eq!(s.to_string(), "0110");
        assert_eq!(s.weight(), 2);
        assert_eq!(s.index(), 6);
        assert_eq!(BitString::from_index(4, 6).unwrap(), s);
        assert!("01a".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
        assert!(b("01").xor(&b("011")).is_err());
    }

    #[test]
    fn parity_unitary_examples() {
        let zero = build_parity_unitary(&b("000")).unwrap();
        assert_eq!(zero, OperatorMatrix::identity(3));
        assert!((zero.normalized_trace() - c(1.0)).norm() < 1e-15);

        let u = build_parity_unitary(&b("10")).unwrap();
        let expected = pauli_x().tensor_with_limit(&OperatorMatrix::identity(1), 2).unwrap();
        assert_eq!(u, expected);
        assert!(u.trace().norm() < 1e-15);
    }

    #[test]
    fn parity_unitary_squares_to_identity() {
        for s in BitString::all(3) {
            let u = build_parity_unitary(&s).unwrap();
            assert!((&u * &u).max_abs_diff(&OperatorMatrix::identity(3)) < 1e-15);
        }
    }

    #[test]
    fn rotation_examples() {
        for shape in [RotationShape::Uniform, RotationShape::Excluding(1), RotationShape::TailFrom(0)] {
            let spec = RotationSpec { theta: 0.0, phi: 0.0, shape };
            assert!(build_rotation(&spec, 3).unwrap().max_abs_diff(&OperatorMatrix::identity(3)) < 1e-15);
        }
        let r = build_rotation(&RotationSpec::uniform(std::f64::consts::FRAC_PI_2), 1).unwrap();
        assert!((r.normalized_trace().re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(rotation_product(&RotationSpec::excluding(0.3, 3), 3).is_err());
        assert!(rotation_product(&RotationSpec::tail_from(0.3, 5), 3).is_err());
    }

    #[test]
    fn excluding_shape_is_dense_eq9_product() {
        let theta = std::f64::consts::FRAC_PI_2;
        let n = 2;
        let j = 0;
        let uniform = build_rotation(&RotationSpec::uniform(theta), n).unwrap();
        let undo = embed(&rx2(theta).adjoint(), j, n).unwrap();
        let dense = &undo * &uniform;
        let built = build_rotation(&RotationSpec::excluding(theta, j), n).unwrap();
        assert!(built.is_unitary());
        assert!(built.max_abs_diff(&dense) < 1e-15);
    }

    #[test]
    fn rx_matches_exponential_series() {
        // exp(iθσx/2) summed as a power series
        let theta = 0.9;
        let gen = pauli_x2() * Complex64::new(0.0, theta / 2.0);
        let mut term = identity2();
        let mut sum = identity2();
        for k in 1..30 {
            term = term * gen / Complex64::new(k as f64, 0.0);
            sum += term;
        }
        assert!((sum - rx2(theta)).norm() < 1e-14);
    }

    #[test]
    fn controlled_examples() {
        assert_eq!(controlled(&OperatorMatrix::identity(2)).unwrap(), OperatorMatrix::identity(3));
        let cx = controlled(&pauli_x()).unwrap();
        assert_eq!(cx, cnot(0, 1, 2).unwrap());
        let rho = DensityMatrix::basis_state(2, 0b10).unwrap();
        let out = apply_unitary(&rho, &cx).unwrap();
        assert_eq!(out, DensityMatrix::basis_state(2, 0b11).unwrap());
        let not_unitary = OperatorMatrix::identity(1).scale(c(2.0));
        assert!(matches!(controlled(&not_unitary), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn first_gate_block_hand_product() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        #[rustfmt::skip]
        let hand = [
            h, 0.0, h, 0.0,
            0.0, h, 0.0, h,
            0.0, h, 0.0, -h,
            h, 0.0, -h, 0.0,
        ];
        let hand = OperatorMatrix::from_rows(4, &hand.map(c)).unwrap();
        let built = &cnot(0, 1, 2).unwrap() * &embed(&hadamard2(), 0, 2).unwrap();
        assert!(built.max_abs_diff(&hand) < 1e-15);
    }

    #[test]
    fn bell_state_from_h_then_cnot() {
        let u = &cnot(0, 1, 2).unwrap() * &embed(&hadamard2(), 0, 2).unwrap();
        let out = apply_unitary(&DensityMatrix::basis_state(2, 0).unwrap(), &u).unwrap();
        let m = out.as_matrix();
        for (r, col) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((m[(r, col)] - c(0.5)).norm() < 1e-15);
        }
        assert!(m[(1, 1)].norm() < 1e-15 && m[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn conversion_identity_exhaustive() {
        for n in 1..=4 {
            for s in BitString::all(n) {
                let converted = converted_parity_circuit(&s).unwrap();
                let direct = controlled(&build_parity_unitary(&s).unwrap()).unwrap();
                assert!(converted.max_abs_diff(&direct) < 1e-12, "s = {s}");
            }
        }
    }

    #[test]
    fn pure_output_examples() {
        let s = b("0110");
        let state = noiseless_oracle_output(&s).unwrap();
        let expected = lpn_pure_output(&BitString::zeros(4).unwrap(), &s, PhaseSign::Plus).unwrap();
        assert!((state - &expected).norm() < 1e-12);
        // conditioned on result = 1 the data register holds s
        let lower = (1 << 4) | s.index() as usize;
        let weight_one: f64 = (16..32).map(|i| expected[i].norm_sqr()).sum();
        assert!((expected[lower].norm_sqr() / weight_one - 1.0).abs() < 1e-12);

        let v = lpn_pure_output(&b("01"), &b("11"), PhaseSign::Minus).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0b001] - c(h)).norm() < 1e-15);
        assert!((v[0b110] - c(-h)).norm() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-15);

        let prod = lpn_pure_output(&b("10"), &b("00"), PhaseSign::Plus).unwrap();
        assert!((prod[0b010] - c(h)).norm() < 1e-15 && (prod[0b110] - c(h)).norm() < 1e-15);

        assert!(lpn_pure_output(&b("1"), &b("10"), PhaseSign::Plus).is_err());
    }

    #[test]
    fn error_identities() {
        assert!(error_identity_check());
        assert!(!propagation_identity_holds(&OperatorMatrix::identity(1)));
        assert!(double_phase_flip_cancels());
    }

    #[test]
    fn cnot_validation() {
        assert!(cnot(0, 0, 2).is_err());
        assert!(cnot(0, 2, 2).is_err());
    }
}
