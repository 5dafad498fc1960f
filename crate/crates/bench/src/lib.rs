//! Shared inputs for the benchmarks.

use dqc1_lpn::circuits::{parity_product, rotation_product, BitString, ProductOperator, RotationSpec};
use dqc1_lpn::{Dqc1Config, Result};

/// `1010…` on `n` bits: half the qubits couple to the probe.
pub fn alternating(n: usize) -> Result<BitString> {
    BitString::new((0..n).map(|k| k % 2 == 0).collect())
}

/// The probing block for the last data qubit, as a product operator.
pub fn probing_block(s: &BitString, theta: f64) -> Result<ProductOperator> {
    let n = s.len();
    let rotation = rotation_product(&RotationSpec::excluding(theta, n - 1), n)?;
    Ok(&rotation * &parity_product(s))
}

pub fn config(n: usize) -> Dqc1Config {
    Dqc1Config::new(n, 0.5).with_p(0.1)
}
