//! Noise channels and error-propagation experiments on the probing circuit.
//!
//! The probing circuit for data qubit `j` is
//! `H (probe) → controlled-U_s → [mid-circuit slot] → controlled-R`, where `R`
//! rotates every data qubit except `j`. All experiments here run it densely.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{
    build_parity_unitary, check_data_index, pauli_z2, identity2, rotation_on, BitString,
    ProductOperator,
};
use crate::dqc1::{readout, simulate, Dqc1Config, EstimateRecord, Stage};
use crate::error::{Error, Result};
use crate::lpn::closed_form_tau;
use crate::qstate::{apply_channel, DensityMatrix, KrausSet};

/// Agreement tolerance between dense traces and the tilt law.
pub const SYSTEMATIC_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Probe depolarizing rate before readout.
    pub p_readout: f64,
    /// Per-data-qubit depolarizing rate between the hidden block and the rotation.
    pub q_mid: f64,
    /// Rotation axis tilt towards ŷ.
    pub phi: f64,
    /// Additive offset on the rotation angle.
    pub theta_error: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, rate) in [("p_readout", self.p_readout), ("q_mid", self.q_mid)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::InvalidParameter(format!("{name} = {rate} outside [0, 1]")));
            }
        }
        if !self.phi.is_finite() || !self.theta_error.is_finite() {
            return Err(Error::InvalidParameter("angles must be finite".into()));
        }
        Ok(())
    }
}

/// Independent single-qubit depolarizing at `rate` on each register qubit in `targets`.
pub fn depolarize(rho: &DensityMatrix, rate: f64, targets: &[usize]) -> Result<DensityMatrix> {
    let single = KrausSet::depolarizing(rate)?;
    let total = rho.qubits();
    let mut out = rho.clone();
    for &t in targets {
        if t >= total {
            return Err(Error::InvalidQubit { index: t, count: total });
        }
        out = apply_channel(&out, &single.embed(t, total)?)?;
    }
    Ok(out)
}

/// Register indices of the data qubits.
pub fn data_targets(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// Rotation on every data qubit except `j`, with the given tilt.
fn probing_rotation(n: usize, theta: f64, phi: f64, j: usize) -> Result<ProductOperator> {
    check_data_index(j, n)?;
    let mask: Vec<bool> = (0..n).map(|k| k != j).collect();
    rotation_on(theta, phi, &mask)
}

/// Stages of the probing circuit with an optional mid-circuit stage.
pub fn probing_stages(
    s: &BitString,
    theta: f64,
    phi: f64,
    j: usize,
    mid: Option<Stage>,
) -> Result<Vec<Stage>> {
    let rotation = probing_rotation(s.len(), theta, phi, j)?.to_operator()?;
    let mut stages = vec![Stage::ProbeHadamard, Stage::Controlled(build_parity_unitary(s)?)];
    stages.extend(mid);
    stages.push(Stage::Controlled(rotation));
    Ok(stages)
}

/// Noise-free output state of the probing circuit for data qubit `j`.
pub fn probing_state(s: &BitString, cfg: &Dqc1Config, j: usize) -> Result<DensityMatrix> {
    check_width(s, cfg)?;
    simulate(cfg, &probing_stages(s, cfg.theta, 0.0, j, None)?)
}

fn check_width(s: &BitString, cfg: &Dqc1Config) -> Result<()> {
    if s.len() != cfg.n {
        return Err(Error::LengthMismatch {
            left: s.len(),
            right: cfg.n,
        });
    }
    Ok(())
}

fn probe_amplitude(ex: f64, ey: f64) -> f64 {
    Complex64::new(ex, ey).norm()
}

/// Depolarizing at rate `q` on every data qubit between the two controlled
/// blocks; returns the probe signal magnitude relative to the noiseless run.
pub fn midcircuit_noise_experiment(s: &BitString, cfg: &Dqc1Config, j: usize, q: f64) -> Result<f64> {
    check_width(s, cfg)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q = {q} outside [0, 1]")));
    }
    let clean = simulate(cfg, &probing_stages(s, cfg.theta, 0.0, j, None)?)?;
    let (cx, cy) = readout(&clean, cfg.p)?;
    let reference = probe_amplitude(cx, cy);
    if reference < 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "noiseless signal vanishes for s = {s}, j = {j}; the ratio is undefined"
        )));
    }
    let mid = Stage::Depolarize {
        rate: q,
        targets: data_targets(cfg.n),
    };
    let noisy = simulate(cfg, &probing_stages(s, cfg.theta, 0.0, j, Some(mid))?)?;
    let (nx, ny) = readout(&noisy, cfg.p)?;
    Ok(probe_amplitude(nx, ny) / reference)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityFlipOutcome {
    pub corrupted: EstimateRecord,
    pub noiseless: EstimateRecord,
    /// Flips that land on qubits coupled to the probe (`s_k = 1`).
    pub coupled_flips: usize,
    /// Flips on `s_k = 0` qubits, which have no CNOT to propagate through.
    pub flagged: Vec<usize>,
}

/// Deterministic `σz` on each data qubit of `flip_set` at the mid-circuit slot.
pub fn phase_flip_parity_experiment(
    s: &BitString,
    cfg: &Dqc1Config,
    j: usize,
    flip_set: &[usize],
) -> Result<ParityFlipOutcome> {
    check_width(s, cfg)?;
    let mut factors = vec![identity2(); cfg.n];
    for &k in flip_set {
        check_data_index(k, cfg.n)?;
        factors[k] *= pauli_z2();
    }
    let flips = ProductOperator::new(factors)?.to_operator()?;

    let clean = simulate(cfg, &probing_stages(s, cfg.theta, 0.0, j, None)?)?;
    let (cx, cy) = readout(&clean, cfg.p)?;
    let corrupted = simulate(
        cfg,
        &probing_stages(s, cfg.theta, 0.0, j, Some(Stage::DataUnitary(flips)))?,
    )?;
    let (ex, ey) = readout(&corrupted, cfg.p)?;

    let coupled_flips = flip_set.iter().filter(|&&k| s.bit(k)).count();
    let flagged = flip_set.iter().copied().filter(|&k| !s.bit(k)).collect();
    Ok(ParityFlipOutcome {
        corrupted: EstimateRecord::exact(ex, ey),
        noiseless: EstimateRecord::exact(cx, cy),
        coupled_flips,
        flagged,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystematicRow {
    pub phi: f64,
    pub theta: f64,
    pub tau_dense: (f64, f64),
    pub tau_predicted: (f64, f64),
    pub agrees: bool,
}

/// Normalized traces of the tilted probing block against the `cos(φ)^m` law,
/// `m` counting ones of `s` on rotated qubits. Rows are `φ`-major.
pub fn systematic_error_sweep(
    s: &BitString,
    j: usize,
    theta_error: f64,
    phi_grid: &[f64],
    theta_grid: &[f64],
) -> Result<Vec<SystematicRow>> {
    let n = s.len();
    check_data_index(j, n)?;
    let parity = build_parity_unitary(s)?;
    let m = s.ones().filter(|&k| k != j).count() as i32;
    let points: Vec<(f64, f64)> = phi_grid
        .iter()
        .flat_map(|&phi| theta_grid.iter().map(move |&theta| (phi, theta)))
        .collect();
    points
        .par_iter()
        .map(|&(phi, theta)| {
            let angle = theta + theta_error;
            let rotation = probing_rotation(n, angle, phi, j)?.to_operator()?;
            let dense = (&rotation * &parity).normalized_trace();
            let predicted = closed_form_tau(s, angle, j, &[])? * phi.cos().powi(m);
            Ok(SystematicRow {
                phi,
                theta,
                tau_dense: (dense.re, dense.im),
                tau_predicted: (predicted.re, predicted.im),
                agrees: (dense - predicted).norm() <= SYSTEMATIC_TOL,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{partial_trace, tensor};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn depolarize_examples() {
        let rho = DensityMatrix::from_bloch([0.2, 0.4, 0.8]).unwrap();
        assert!(depolarize(&rho, 0.0, &[0]).unwrap().max_abs_diff(&rho) < 1e-15);

        let probe = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let data = DensityMatrix::from_bloch([0.3, 0.0, -0.5]).unwrap();
        let both = tensor(&tensor(&probe, &data).unwrap(), &data).unwrap();
        let out = depolarize(&both, 1.0, &[1, 2]).unwrap();
        let reduced = partial_trace(&out, &[1, 2]).unwrap();
        assert!(reduced.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);

        let q = 0.3;
        let shrunk = depolarize(&probe, q, &[0]).unwrap();
        let z = (shrunk.as_matrix()[(0, 0)] - shrunk.as_matrix()[(1, 1)]).re;
        assert!((z - (1.0 - q)).abs() < 1e-15);

        assert!(depolarize(&probe, 0.1, &[1]).is_err());
        assert!(depolarize(&probe, 1.1, &[0]).is_err());
    }

    #[test]
    fn maximally_mixed_is_fixed() {
        let mixed = DensityMatrix::maximally_mixed(3);
        let out = depolarize(&mixed, 0.37, &[0, 1, 2]).unwrap();
        assert_eq!(out.max_abs_diff(&mixed), 0.0);
    }

    #[test]
    fn midcircuit_examples() {
        let s = b("10");
        let cfg = Dqc1Config::new(2, 1.0);
        assert!((midcircuit_noise_experiment(&s, &cfg, 1, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let q = 0.05;
        let ratio = midcircuit_noise_experiment(&s, &cfg, 1, q).unwrap();
        assert!(ratio >= 1.0 - q - 3.0 * q * q && ratio <= 1.0 - q + 3.0 * q * q);

        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let r = midcircuit_noise_experiment(&s, &cfg, 1, 0.02 * k as f64).unwrap();
            assert!(r <= last + 1e-12);
            last = r;
        }
        assert!(midcircuit_noise_experiment(&s, &cfg, 0, 0.1).is_err());
    }

    #[test]
    fn parity_flip_examples() {
        let s = b("1101");
        let cfg = Dqc1Config::new(4, 0.9).with_p(0.1);
        let j = 2;
        let even = phase_flip_parity_experiment(&s, &cfg, j, &[0, 3]).unwrap();
        assert!((even.corrupted.ex - even.noiseless.ex).abs() < 1e-12);
        assert!((even.corrupted.ey - even.noiseless.ey).abs() < 1e-12);
        assert_eq!(even.coupled_flips, 2);

        let odd = phase_flip_parity_experiment(&s, &cfg, j, &[1]).unwrap();
        assert!(odd.noiseless.signal() > 0.1);
        assert!((odd.corrupted.ex + odd.noiseless.ex).abs() < 1e-12);
        assert!((odd.corrupted.ey + odd.noiseless.ey).abs() < 1e-12);

        let uncoupled = phase_flip_parity_experiment(&s, &cfg, j, &[2]).unwrap();
        assert_eq!(uncoupled.flagged, vec![2]);
        assert!((uncoupled.corrupted.ex - uncoupled.noiseless.ex).abs() < 1e-12);
        assert!((uncoupled.corrupted.ey - uncoupled.noiseless.ey).abs() < 1e-12);
    }

    #[test]
    fn systematic_examples() {
        let s = b("011");
        let rows = systematic_error_sweep(&s, 0, 0.0, &[0.0, FRAC_PI_3, FRAC_PI_2], &[FRAC_PI_2]).unwrap();
        assert!(rows.iter().all(|r| r.agrees));
        assert!((rows[0].tau_dense.0 + 0.5).abs() < 1e-12);
        assert!((rows[1].tau_dense.0 + 0.125).abs() < 1e-12);
        assert!(rows[1].tau_dense.1.abs() < 1e-12);
        assert!(Complex64::new(rows[2].tau_dense.0, rows[2].tau_dense.1).norm() < 1e-12);
    }

    #[test]
    fn noise_spec_validation() {
        assert!(NoiseSpec::default().validate().is_ok());
        let bad = NoiseSpec {
            q_mid: -0.1,
            ..NoiseSpec::default()
        };
        assert!(bad.validate().is_err());
    }
}
