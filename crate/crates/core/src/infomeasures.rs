//! Correlation and coherence diagnostics across the probe/data split.
//!
//! All entropies are in bits. Discord is taken with respect to rank-1
//! projective measurements on the probe qubit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    hermitian_eigenvalues, partial_trace, partial_transpose, spectrum_entropy, von_neumann_entropy,
    CMatrix, DensityMatrix,
};

/// `-x log2 x - (1-x) log2(1-x)`, zero at both endpoints. Inputs are clamped to `[0, 1]`.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    spectrum_entropy(&[x, 1.0 - x])
}

/// `S(diag ρ) - S(ρ)` in the computational basis.
pub fn rel_entropy_coherence(rho: &DensityMatrix) -> f64 {
    let diag: Vec<f64> = rho.as_matrix().diagonal().iter().map(|z| z.re).collect();
    (spectrum_entropy(&diag) - von_neumann_entropy(rho)).max(0.0)
}

/// Probe coherence lost in one run: `H2((1-α|τ|)/2) - H2((1-α)/2)`.
pub fn coherence_consumption(alpha: f64, tau_abs: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&tau_abs) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} and |tau| = {tau_abs} must lie in [0, 1]"
        )));
    }
    Ok(binary_entropy((1.0 - alpha * tau_abs) / 2.0) - binary_entropy((1.0 - alpha) / 2.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordOptions {
    /// Grid points over the polar angle `[0, π]`.
    pub polar_steps: usize,
    /// Grid points over the azimuth `[0, 2π)`.
    pub azimuth_steps: usize,
    /// Final bracket width of the line searches, radians.
    pub resolution: f64,
    /// Stop refining when a sweep improves the objective by less than this (bits).
    pub tolerance: f64,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self {
            polar_steps: 64,
            azimuth_steps: 128,
            resolution: 1e-6,
            tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordResult {
    pub discord: f64,
    /// Bloch angles `(polar, azimuth)` of the optimal measurement axis.
    pub optimal_measurement: (f64, f64),
    /// Coordinate-descent sweeps after the grid stage.
    pub iterations: usize,
}

/// `ρ` split as `Σ_ab |a><b| ⊗ ρ_ab` over the probe qubit.
struct ProbeBlocks {
    blocks: [[CMatrix; 2]; 2],
}

impl ProbeBlocks {
    fn new(rho: &DensityMatrix, probe: usize) -> Self {
        let total = rho.qubits();
        let others: Vec<usize> = (0..total).filter(|&q| q != probe).collect();
        let rest = 1usize << others.len();
        let index = |a: usize, r: usize| {
            let mut full = a << (total - 1 - probe);
            for (pos, &q) in others.iter().enumerate() {
                let bit = (r >> (others.len() - 1 - pos)) & 1;
                full |= bit << (total - 1 - q);
            }
            full
        };
        let m = rho.as_matrix();
        let block = |a: usize, b: usize| CMatrix::from_fn(rest, rest, |r, c| m[(index(a, r), index(b, c))]);
        Self {
            blocks: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]],
        }
    }

    /// `Σ_± p_± S(ρ_rest|±)` for the measurement along `(polar, azimuth)`.
    fn conditional_entropy(&self, polar: f64, azimuth: f64) -> f64 {
        let (nx, ny, nz) = (
            polar.sin() * azimuth.cos(),
            polar.sin() * azimuth.sin(),
            polar.cos(),
        );
        let [[b00, b01], [b10, b11]] = &self.blocks;
        [1.0, -1.0]
            .iter()
            .map(|&sign| {
                // projector entries Π_ab of (1 ± n·σ)/2
                let p00 = Complex64::new(0.5 * (1.0 + sign * nz), 0.0);
                let p11 = Complex64::new(0.5 * (1.0 - sign * nz), 0.0);
                let p01 = Complex64::new(0.5 * sign * nx, -0.5 * sign * ny);
                let p10 = p01.conj();
                let cond = b00 * p00 + b01 * p10 + b10 * p01 + b11 * p11;
                let prob = cond.trace().re;
                if prob <= 1e-15 {
                    return 0.0;
                }
                let eigs: Vec<f64> = hermitian_eigenvalues(&cond).iter().map(|l| l / prob).collect();
                prob * spectrum_entropy(&eigs)
            })
            .sum()
    }
}

fn check_probe(rho: &DensityMatrix, probe: usize) -> Result<()> {
    if rho.qubits() < 2 {
        return Err(Error::InvalidParameter(
            "discord needs the probe plus at least one other qubit".into(),
        ));
    }
    if probe >= rho.qubits() {
        return Err(Error::InvalidQubit {
            index: probe,
            count: rho.qubits(),
        });
    }
    Ok(())
}

/// Golden-section minimum of `f` on `[lo, hi]` down to width `resolution`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, resolution: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > resolution {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Quantum discord with the measurement on `probe`, default optimizer settings.
pub fn quantum_discord(rho: &DensityMatrix, probe: usize) -> Result<DiscordResult> {
    quantum_discord_with(rho, probe, &DiscordOptions::default())
}

/// `S(ρ_probe) - S(ρ) + min Σ p_± S(ρ_rest|±)`: grid search, then coordinate
/// descent with golden-section line searches.
pub fn quantum_discord_with(rho: &DensityMatrix, probe: usize, opts: &DiscordOptions) -> Result<DiscordResult> {
    check_probe(rho, probe)?;
    if opts.polar_steps < 2 || opts.azimuth_steps < 1 {
        return Err(Error::InvalidParameter("discord grid is too small".into()));
    }
    let blocks = ProbeBlocks::new(rho, probe);
    let objective = |polar: f64, azimuth: f64| blocks.conditional_entropy(polar, azimuth);

    let polar_step = PI / (opts.polar_steps - 1) as f64;
    let azimuth_step = 2.0 * PI / opts.azimuth_steps as f64;
    let grid: Vec<(usize, usize)> = (0..opts.polar_steps)
        .flat_map(|i| (0..opts.azimuth_steps).map(move |k| (i, k)))
        .collect();
    let (mut best, mut polar, mut azimuth) = grid
        .par_iter()
        .map(|&(i, k)| {
            let (t, p) = (i as f64 * polar_step, k as f64 * azimuth_step);
            (objective(t, p), t, p)
        })
        .reduce(
            || (f64::INFINITY, 0.0, 0.0),
            |a, b| if b.0 < a.0 { b } else { a },
        );

    let mut iterations = 0;
    loop {
        iterations += 1;
        let before = best;
        let (t, v) = golden_section(
            |t| objective(t, azimuth),
            (polar - polar_step).max(0.0),
            (polar + polar_step).min(PI),
            opts.resolution,
        );
        if v < best {
            best = v;
            polar = t;
        }
        let (p, v) = golden_section(
            |p| objective(polar, p),
            azimuth - azimuth_step,
            azimuth + azimuth_step,
            opts.resolution,
        );
        if v < best {
            best = v;
            azimuth = p;
        }
        if before - best < opts.tolerance || iterations >= 100 {
            break;
        }
    }

    let probe_state = partial_trace(rho, &[probe])?;
    let discord = von_neumann_entropy(&probe_state) - von_neumann_entropy(rho) + best;
    Ok(DiscordResult {
        discord: discord.max(0.0),
        optimal_measurement: (polar, azimuth.rem_euclid(2.0 * PI)),
        iterations,
    })
}

/// `I(probe : rest) = S(ρ_probe) + S(ρ_rest) - S(ρ)`.
pub fn mutual_information(rho: &DensityMatrix, probe: usize) -> Result<f64> {
    check_probe(rho, probe)?;
    let rest: Vec<usize> = (0..rho.qubits()).filter(|&q| q != probe).collect();
    Ok(von_neumann_entropy(&partial_trace(rho, &[probe])?)
        + von_neumann_entropy(&partial_trace(rho, &rest)?)
        - von_neumann_entropy(rho))
}

/// Smallest eigenvalue of the partial transpose on `probe`; negative values witness entanglement.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, probe: usize) -> Result<f64> {
    let pt = partial_transpose(rho, probe)?;
    Ok(hermitian_eigenvalues(&pt).first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_parity_unitary, BitString};
    use crate::dqc1::{run_protocol, Dqc1Config};
    use crate::qstate::{tensor, CVector};

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.25) - 0.811_278_1).abs() < 1e-7);
    }

    #[test]
    fn coherence_examples() {
        let diag = DensityMatrix::from_bloch([0.0, 0.0, 0.4]).unwrap();
        assert!(rel_entropy_coherence(&diag).abs() < 1e-12);
        for alpha in [0.2, 0.5, 1.0] {
            let rho = DensityMatrix::from_bloch([alpha, 0.0, 0.0]).unwrap();
            let expected = 1.0 - binary_entropy((1.0 - alpha) / 2.0);
            assert!((rel_entropy_coherence(&rho) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn consumption_examples() {
        assert!(coherence_consumption(0.7, 1.0).unwrap().abs() < 1e-15);
        assert!((coherence_consumption(0.5, 0.0).unwrap() - 0.188_721_9).abs() < 1e-7);
        let mut last = f64::INFINITY;
        for k in 0..=20 {
            let v = coherence_consumption(0.6, k as f64 / 20.0).unwrap();
            assert!(v <= last + 1e-15);
            last = v;
        }
        assert!(coherence_consumption(1.1, 0.0).is_err());
    }

    #[test]
    fn unrotated_circuit_has_no_discord() {
        let s: BitString = "10".parse().unwrap();
        let cfg = Dqc1Config::new(2, 0.8);
        let rho = run_protocol(&cfg, &build_parity_unitary(&s).unwrap()).unwrap();
        assert!(quantum_discord(&rho, 0).unwrap().discord < 1e-6);
        let mixed = DensityMatrix::maximally_mixed(3);
        assert!(quantum_discord(&mixed, 0).unwrap().discord < 1e-9);
    }

    #[test]
    fn bell_state_discord_is_one_bit() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let psi = CVector::from_vec(vec![Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)]);
        let bell = DensityMatrix::from_pure(&psi).unwrap();
        let d = quantum_discord(&bell, 0).unwrap();
        assert!((d.discord - 1.0).abs() < 1e-9);
        assert!((ppt_min_eigenvalue(&bell, 0).unwrap() + 0.5).abs() < 1e-12);
        assert!((mutual_information(&bell, 1).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_is_ppt() {
        let a = DensityMatrix::from_bloch([0.3, 0.1, 0.2]).unwrap();
        let b = DensityMatrix::from_bloch([0.0, -0.5, 0.5]).unwrap();
        assert!(ppt_min_eigenvalue(&tensor(&a, &b).unwrap(), 0).unwrap() >= -1e-12);
    }

    #[test]
    fn probe_validation() {
        let one = DensityMatrix::maximally_mixed(1);
        assert!(quantum_discord(&one, 0).is_err());
        let two = DensityMatrix::maximally_mixed(2);
        assert!(quantum_discord(&two, 2).is_err());
    }
}
