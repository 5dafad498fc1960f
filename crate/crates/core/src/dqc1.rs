//! The one-clean-qubit trace estimation protocol.
//!
//! A probe with polarization `α` and a maximally mixed data register pass
//! through a Hadamard on the probe followed by probe-controlled blocks. The
//! probe's `σx` and `σy` expectations then read `(1-p)·α·tr(W)/2^n`, where
//! `p` is the depolarizing rate hitting the probe before readout.

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuits::{controlled, hadamard, ProductOperator};
use crate::error::{Error, Result};
use crate::noise;
use crate::qstate::{
    apply_channel, apply_unitary, expectation, partial_trace, tensor, DensityMatrix, KrausSet,
    OperatorMatrix, Tensor, DEFAULT_MAX_QUBITS,
};
use crate::rng;

/// How noiseless expectations are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Full density-matrix simulation of the register.
    Dense,
    /// Product of per-qubit traces.
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dqc1Config {
    /// Number of data qubits.
    pub n: usize,
    /// Probe polarization in `[0, 1]`.
    pub alpha: f64,
    /// Probe depolarizing rate before readout, in `[0, 1)`.
    pub p: f64,
    pub theta: f64,
    pub backend: Backend,
    pub seed: u64,
}

impl Dqc1Config {
    /// Noiseless readout, `θ = π/2`, closed-form backend, seed 0.
    pub fn new(n: usize, alpha: f64) -> Self {
        Self {
            n,
            alpha,
            p: 0.0,
            theta: std::f64::consts::FRAC_PI_2,
            backend: Backend::ClosedForm,
            seed: 0,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "polarization alpha = {} outside [0, 1]",
                self.alpha
            )));
        }
        // the readout must keep some signal
        if !(0.0..1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!(
                "readout depolarizing rate p = {} outside [0, 1)",
                self.p
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be finite".into()));
        }
        if self.backend == Backend::Dense && self.n + 1 > DEFAULT_MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: self.n + 1,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        Ok(())
    }
}

/// Sampled (or exact) probe expectations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub ex: f64,
    pub ey: f64,
    pub se_x: f64,
    pub se_y: f64,
    /// Ensemble members read out per query.
    pub ensemble_l: u64,
    /// Queries averaged.
    pub queries_q: u64,
}

impl EstimateRecord {
    /// Noiseless values, reported as a single query of a single system.
    pub fn exact(ex: f64, ey: f64) -> Self {
        Self {
            ex,
            ey,
            se_x: 0.0,
            se_y: 0.0,
            ensemble_l: 1,
            queries_q: 1,
        }
    }

    /// `|ex| + |ey|`, the statistic the bit decision thresholds.
    pub fn signal(&self) -> f64 {
        self.ex.abs() + self.ey.abs()
    }
}

/// Which probe observables get a shot budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observables {
    Both,
    X,
    Y,
}

impl Observables {
    pub fn measures_x(self) -> bool {
        matches!(self, Observables::Both | Observables::X)
    }

    pub fn measures_y(self) -> bool {
        matches!(self, Observables::Both | Observables::Y)
    }
}

/// One step of a dense circuit on the probe + data register.
#[derive(Clone, Debug)]
pub enum Stage {
    /// Hadamard on the probe.
    ProbeHadamard,
    /// Probe-controlled block acting on the data register.
    Controlled(OperatorMatrix),
    /// Uncontrolled unitary on the data register.
    DataUnitary(OperatorMatrix),
    /// Independent depolarizing on the listed register qubits (probe is 0).
    Depolarize { rate: f64, targets: Vec<usize> },
    /// Arbitrary channel on the full register.
    Channel(KrausSet),
}

/// `(1 + ασz)/2 ⊗ 1/2^n`.
pub fn initial_state(cfg: &Dqc1Config) -> Result<DensityMatrix> {
    cfg.validate()?;
    let probe = DensityMatrix::from_bloch([0.0, 0.0, cfg.alpha])?;
    tensor(&probe, &DensityMatrix::maximally_mixed(cfg.n))
}

/// Evolve the initial state through `stages`.
pub fn simulate(cfg: &Dqc1Config, stages: &[Stage]) -> Result<DensityMatrix> {
    let mut rho = initial_state(cfg)?;
    let data_dim = 1usize << cfg.n;
    let check_data = |op: &OperatorMatrix| {
        if op.dim() != data_dim {
            return Err(Error::DimensionMismatch {
                expected: data_dim,
                found: op.dim(),
            });
        }
        Ok(())
    };
    for stage in stages {
        rho = match stage {
            Stage::ProbeHadamard => {
                let h = hadamard().tensor_with_limit(&OperatorMatrix::identity(cfg.n), DEFAULT_MAX_QUBITS)?;
                apply_unitary(&rho, &h)?
            }
            Stage::Controlled(w) => {
                check_data(w)?;
                apply_unitary(&rho, &controlled(w)?)?
            }
            Stage::DataUnitary(w) => {
                check_data(w)?;
                let full = OperatorMatrix::identity(1).tensor_with_limit(w, DEFAULT_MAX_QUBITS)?;
                apply_unitary(&rho, &full)?
            }
            Stage::Depolarize { rate, targets } => noise::depolarize(&rho, *rate, targets)?,
            Stage::Channel(k) => apply_channel(&rho, k)?,
        };
    }
    Ok(rho)
}

/// Hadamard on the probe then `controlled(w)`.
pub fn run_protocol(cfg: &Dqc1Config, w: &OperatorMatrix) -> Result<DensityMatrix> {
    simulate(cfg, &[Stage::ProbeHadamard, Stage::Controlled(w.clone())])
}

/// Depolarize the probe at rate `p`, then read `(⟨σx⟩, ⟨σy⟩)`.
pub fn readout(rho: &DensityMatrix, p: f64) -> Result<(f64, f64)> {
    let probe = partial_trace(rho, &[0])?;
    let probe = apply_channel(&probe, &KrausSet::depolarizing(p)?)?;
    Ok((
        expectation(&probe, &crate::circuits::pauli_x())?,
        expectation(&probe, &crate::circuits::pauli_y())?,
    ))
}

/// Noiseless expectations `ex + i·ey = (1-p)·α·tr(w)/2^n` via the configured backend.
pub fn analytic_expectations(cfg: &Dqc1Config, w: &ProductOperator) -> Result<(f64, f64)> {
    cfg.validate()?;
    if w.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            found: w.len(),
        });
    }
    match cfg.backend {
        Backend::Dense => {
            let rho = run_protocol(cfg, &w.to_operator()?)?;
            readout(&rho, cfg.p)
        }
        Backend::ClosedForm => Ok(attenuated(cfg, w.normalized_trace())),
    }
}

/// `(1-p)·α·τ` split into real and imaginary parts.
pub fn attenuated(cfg: &Dqc1Config, tau: Complex64) -> (f64, f64) {
    let z = tau * ((1.0 - cfg.p) * cfg.alpha);
    (z.re, z.im)
}

const TAG_SAMPLE: u64 = 0x5348_4f54;

fn sample_mean(seed: u64, observable: u64, mean: f64, ensemble: u64, queries: u64) -> Result<(f64, f64)> {
    let p_plus = ((1.0 + mean) / 2.0).clamp(0.0, 1.0);
    let binom = Binomial::new(ensemble, p_plus)
        .map_err(|e| Error::InvalidParameter(format!("shot distribution: {e}")))?;
    let mut plus_total: u128 = 0;
    for q in 0..queries {
        let mut rng = rng::stream(seed, &[TAG_SAMPLE, observable, q]);
        plus_total += binom.sample(&mut rng) as u128;
    }
    let shots = ensemble as f64 * queries as f64;
    let est = 2.0 * plus_total as f64 / shots - 1.0;
    let se = ((1.0 - est * est).max(0.0) / shots).sqrt();
    Ok((est, se))
}

/// Finite-ensemble estimates of both observables from separate shot budgets.
pub fn sample_expectations(
    cfg: &Dqc1Config,
    true_ex: f64,
    true_ey: f64,
    ensemble: u64,
    queries: u64,
) -> Result<EstimateRecord> {
    sample_observables(cfg, true_ex, true_ey, ensemble, queries, Observables::Both)
}

/// Like [`sample_expectations`], but an unmeasured observable reads 0 with zero error.
pub fn sample_observables(
    cfg: &Dqc1Config,
    true_ex: f64,
    true_ey: f64,
    ensemble: u64,
    queries: u64,
    which: Observables,
) -> Result<EstimateRecord> {
    const SLACK: f64 = 1e-12;
    if true_ex.abs() > 1.0 + SLACK || true_ey.abs() > 1.0 + SLACK {
        return Err(Error::InvalidParameter(format!(
            "expectations ({true_ex}, {true_ey}) outside [-1, 1]"
        )));
    }
    if ensemble == 0 || queries == 0 {
        return Err(Error::InvalidParameter(
            "ensemble size and query count must be >= 1".into(),
        ));
    }
    let (ex, se_x) = if which.measures_x() {
        sample_mean(cfg.seed, 0, true_ex, ensemble, queries)?
    } else {
        (0.0, 0.0)
    };
    let (ey, se_y) = if which.measures_y() {
        sample_mean(cfg.seed, 1, true_ey, ensemble, queries)?
    } else {
        (0.0, 0.0)
    };
    Ok(EstimateRecord {
        ex,
        ey,
        se_x,
        se_y,
        ensemble_l: ensemble,
        queries_q: queries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{parity_product, rotation_product, BitString, RotationSpec};
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn initial_state_examples() {
        let mixed = initial_state(&Dqc1Config::new(2, 0.0)).unwrap();
        assert!(mixed.max_abs_diff(&DensityMatrix::maximally_mixed(3)) < 1e-15);

        let pure = initial_state(&Dqc1Config::new(0, 1.0)).unwrap();
        assert!(pure.max_abs_diff(&DensityMatrix::basis_state(1, 0).unwrap()) < 1e-15);

        let half = initial_state(&Dqc1Config::new(1, 0.5)).unwrap();
        let diag = [0.375, 0.375, 0.125, 0.125];
        for (k, d) in diag.iter().enumerate() {
            assert!((half.as_matrix()[(k, k)] - c(*d)).norm() < 1e-15);
        }
    }

    #[test]
    fn config_rejects_bad_ranges() {
        assert!(Dqc1Config::new(2, 1.2).validate().is_err());
        assert!(Dqc1Config::new(2, 1.0).with_p(1.0).validate().is_err());
        assert!(Dqc1Config::new(2, 1.0).with_p(0.999).validate().is_ok());
        assert!(Dqc1Config::new(12, 1.0).with_backend(Backend::Dense).validate().is_err());
    }

    #[test]
    fn protocol_identity_block() {
        let cfg = Dqc1Config::new(2, 0.6);
        let rho = run_protocol(&cfg, &OperatorMatrix::identity(2)).unwrap();
        let probe = partial_trace(&rho, &[0]).unwrap();
        let expected = DensityMatrix::from_bloch([0.6, 0.0, 0.0]).unwrap();
        assert!(probe.max_abs_diff(&expected) < 1e-15);
        let data = partial_trace(&rho, &[1, 2]).unwrap();
        assert!(data.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);
    }

    #[test]
    fn protocol_traceless_parity() {
        let cfg = Dqc1Config::new(3, 0.8);
        let u = crate::circuits::build_parity_unitary(&"101".parse().unwrap()).unwrap();
        let probe = partial_trace(&run_protocol(&cfg, &u).unwrap(), &[0]).unwrap();
        assert!(probe.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
    }

    #[test]
    fn protocol_rotated_off_diagonal() {
        // τ = i/2 for R⊗R(π/2)·U_10
        let s: BitString = "10".parse().unwrap();
        let w = &rotation_product(&RotationSpec::uniform(FRAC_PI_2), 2).unwrap() * &parity_product(&s);
        let cfg = Dqc1Config::new(2, 0.7);
        let probe = partial_trace(&run_protocol(&cfg, &w.to_operator().unwrap()).unwrap(), &[0]).unwrap();
        let tau = Complex64::new(0.0, 0.5);
        let expected = tau.conj() * (cfg.alpha / 2.0);
        assert!((w.normalized_trace() - tau).norm() < 1e-15);
        assert!((probe.as_matrix()[(0, 1)] - expected).norm() < 1e-15);
    }

    #[test]
    fn analytic_examples() {
        let id = ProductOperator::identity(2).unwrap();
        for backend in [Backend::Dense, Backend::ClosedForm] {
            let cfg = Dqc1Config::new(2, 1.0).with_backend(backend);
            let (ex, ey) = analytic_expectations(&cfg, &id).unwrap();
            assert!((ex - 1.0).abs() < 1e-12 && ey.abs() < 1e-12);

            let cfg = Dqc1Config::new(2, 0.3).with_p(0.4).with_backend(backend);
            let (ex, ey) = analytic_expectations(&cfg, &parity_product(&"01".parse().unwrap())).unwrap();
            assert!(ex.abs() < 1e-12 && ey.abs() < 1e-12);

            let s: BitString = "10".parse().unwrap();
            let w = &rotation_product(&RotationSpec::uniform(FRAC_PI_2), 2).unwrap() * &parity_product(&s);
            let cfg = Dqc1Config::new(2, 0.5).with_p(0.5).with_backend(backend);
            let (ex, ey) = analytic_expectations(&cfg, &w).unwrap();
            assert!(ex.abs() < 1e-12 && (ey - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_rejects_wrong_width() {
        let cfg = Dqc1Config::new(3, 1.0);
        assert!(analytic_expectations(&cfg, &ProductOperator::identity(2).unwrap()).is_err());
    }

    #[test]
    fn sampling_converges() {
        let cfg = Dqc1Config::new(1, 1.0).with_seed(11);
        let rec = sample_expectations(&cfg, 0.3, -0.55, 1000, 1000).unwrap();
        assert!((rec.ex - 0.3).abs() < 5e-3);
        assert!((rec.ey + 0.55).abs() < 5e-3);
        assert_eq!(rec.ensemble_l * rec.queries_q, 1_000_000);
    }

    #[test]
    fn sampling_extremes_are_exact() {
        let cfg = Dqc1Config::new(1, 1.0).with_seed(3);
        let rec = sample_expectations(&cfg, 1.0, -1.0, 17, 5).unwrap();
        assert_eq!((rec.ex, rec.ey, rec.se_x, rec.se_y), (1.0, -1.0, 0.0, 0.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = Dqc1Config::new(1, 1.0).with_seed(42);
        let a = sample_expectations(&cfg, 0.1, 0.2, 64, 33).unwrap();
        let b = sample_expectations(&cfg, 0.1, 0.2, 64, 33).unwrap();
        assert_eq!(a, b);
        let other = sample_expectations(&cfg.with_seed(43), 0.1, 0.2, 64, 33).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn sampling_single_observable() {
        let cfg = Dqc1Config::new(1, 1.0).with_seed(1);
        let rec = sample_observables(&cfg, 0.5, 0.5, 100, 10, Observables::Y).unwrap();
        assert_eq!((rec.ex, rec.se_x), (0.0, 0.0));
        assert!(rec.ey != 0.0);
        assert!(sample_expectations(&cfg, 1.5, 0.0, 1, 1).is_err());
        assert!(sample_expectations(&cfg, 0.0, 0.0, 0, 1).is_err());
    }
}
