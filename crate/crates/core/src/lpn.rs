//! Learning a hidden parity string one data qubit at a time.
//!
//! At step `j` the learner appends a probe-controlled rotation on every data
//! qubit it has not yet decided (other than `j` itself), plus controlled `σx`
//! corrections on the decided qubits whose bit came out 1. The normalized
//! trace of the whole controlled block is then zero when `s_j = 1` and has
//! magnitude `|sin(θ/2)|^m |cos(θ/2)|^(r-m)` otherwise, with `r` rotated
//! qubits of which `m` carry a one.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{
    build_parity_unitary, check_data_index, identity2, parity_product, pauli_x2, rotation2,
    BitString, ProductOperator,
};
use crate::dqc1::{
    attenuated, readout, sample_observables, simulate, Backend, Dqc1Config, EstimateRecord,
    Observables, Stage,
};
use crate::error::{Error, Result};
use crate::noise::{data_targets, NoiseSpec};
use crate::rng;

/// Constant in front of the Hoeffding-style query count.
pub const HOEFFDING_C: f64 = 2.0;

/// Rotation angles whose per-qubit gap `min(|sin θ/2|, |cos θ/2|)` falls below this are rejected.
pub const GAP_TOL: f64 = 1e-9;

/// Classical noisy parity samples `(x, f_s(x) ⊕ e)` with `Pr[e = 1] = p/2`.
#[derive(Clone, Debug)]
pub struct ClassicalOracle {
    s: BitString,
    p: f64,
    rng: ChaCha8Rng,
}

impl ClassicalOracle {
    pub fn new(s: BitString, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("noise rate p = {p} outside [0, 1)")));
        }
        Ok(Self {
            s,
            p,
            rng: rng::stream(seed, &[0x4f52_4143]),
        })
    }

    pub fn sample(&mut self) -> (BitString, bool) {
        let x = BitString::random(self.s.len(), &mut self.rng).expect("non-empty");
        let e = self.rng.random_bool(self.p / 2.0);
        let y = self.s.dot(&x).expect("same length") ^ e;
        (x, y)
    }

    pub fn samples(&mut self, count: usize) -> Vec<(BitString, bool)> {
        (0..count).map(|_| self.sample()).collect()
    }
}

/// A single classical query.
pub fn classical_oracle(s: &BitString, p: f64, seed: u64) -> Result<(BitString, bool)> {
    Ok(ClassicalOracle::new(s.clone(), p, seed)?.sample())
}

/// `tr(F)/2` for the per-qubit factor `F = R^{rotated} σx^{b}`, where `b` is the
/// bit left on the qubit after any correction.
fn factor_trace(bit: bool, rotated: bool, theta: f64, phi: f64) -> Complex64 {
    match (rotated, bit) {
        (false, false) => Complex64::new(1.0, 0.0),
        (false, true) => Complex64::new(0.0, 0.0),
        (true, false) => Complex64::new((theta / 2.0).cos(), 0.0),
        (true, true) => Complex64::new(0.0, (theta / 2.0).sin() * phi.cos()),
    }
}

fn check_step(n: usize, j: usize, decoupled: &[usize]) -> Result<()> {
    check_data_index(j, n)?;
    for &k in decoupled {
        check_data_index(k, n)?;
        if k == j {
            return Err(Error::InvalidParameter(format!(
                "probed qubit {j} is already decoupled"
            )));
        }
    }
    Ok(())
}

/// Normalized trace for probing qubit `j` with `decoupled` qubits removed from
/// the rotation and correctly flipped back.
pub fn closed_form_tau(s: &BitString, theta: f64, j: usize, decoupled: &[usize]) -> Result<Complex64> {
    check_step(s.len(), j, decoupled)?;
    Ok((0..s.len())
        .map(|k| {
            if decoupled.contains(&k) {
                Complex64::new(1.0, 0.0)
            } else {
                factor_trace(s.bit(k), k != j, theta, 0.0)
            }
        })
        .product())
}

/// The learner's part of the controlled block for one step: rotations on the
/// undecided qubits other than `j`, `σx` on `corrections`.
pub fn step_block(
    n: usize,
    theta: f64,
    phi: f64,
    j: usize,
    decoupled: &[usize],
    corrections: &[usize],
) -> Result<ProductOperator> {
    check_step(n, j, decoupled)?;
    let r = rotation2(theta, phi);
    let factors = (0..n)
        .map(|k| {
            let rot = if k != j && !decoupled.contains(&k) { r } else { identity2() };
            let fix = if corrections.contains(&k) { pauli_x2() } else { identity2() };
            rot * fix
        })
        .collect();
    ProductOperator::new(factors)
}

/// Trace gap between `s_j = 0` and `s_j = 1` when `m` of the rotated qubits
/// carry a one. `decoupled_count` qubits besides `j` are out of the rotation.
pub fn delta_tau(n: usize, m: usize, theta: f64, j: usize, decoupled_count: usize) -> Result<Complex64> {
    check_data_index(j, n)?;
    let rotated = n
        .checked_sub(1 + decoupled_count)
        .ok_or_else(|| Error::InvalidParameter(format!("{decoupled_count} decoupled of {n} qubits")))?;
    if m > rotated {
        return Err(Error::InvalidParameter(format!(
            "{m} ones cannot fit in {rotated} rotated qubits"
        )));
    }
    let on = Complex64::new(0.0, (theta / 2.0).sin());
    let off = Complex64::new((theta / 2.0).cos(), 0.0);
    Ok(on.powu(m as u32) * off.powu((rotated - m) as u32))
}

/// Smallest `|Δτ_j|` over the unknown weight `m` for prefix-decoupled step `j`.
pub fn min_gap(n: usize, theta: f64, j: usize) -> f64 {
    let h = theta / 2.0;
    let base = h.sin().abs().min(h.cos().abs());
    base.powi((n - 1 - j) as i32)
}

/// 1 when the probe signal is below `threshold`.
pub fn decide_bit(est: &EstimateRecord, threshold: f64) -> Result<bool> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidParameter(format!("threshold {threshold} must be positive")));
    }
    Ok(est.signal() < threshold)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetParams {
    /// Failure probability.
    pub delta: f64,
    /// Upper bound on the additive accuracy targeted in each step.
    pub epsilon: f64,
    pub alpha: f64,
    pub p: f64,
    /// Ensemble size `L`; a float so NMR-scale ensembles fit.
    pub ensemble: f64,
    /// Use `delta` for every bit rather than splitting it over the `n` bits.
    pub per_bit_delta: bool,
    /// Abort when a step needs more queries than this.
    pub max_queries: Option<u64>,
    /// Fixed query count per step, bypassing the formula.
    pub queries_override: Option<u64>,
}

impl BudgetParams {
    pub fn new(delta: f64, alpha: f64, p: f64, ensemble: f64) -> Self {
        Self {
            delta,
            epsilon: 0.5,
            alpha,
            p,
            ensemble,
            per_bit_delta: false,
            max_queries: None,
            queries_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must lie in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.p) {
            return bad("p must lie in [0, 1)");
        }
        if !(self.ensemble >= 1.0 && self.ensemble.is_finite()) {
            return bad("ensemble size must be >= 1");
        }
        if self.queries_override == Some(0) {
            return bad("query override must be >= 1");
        }
        Ok(())
    }
}

/// `ceil(C·ln(1/δ) / (L·(α·ε·(1-p))²))` for a step whose trace gap is `gap`,
/// with `ε = min(epsilon, gap/2)`. Saturates at `u64::MAX`.
pub fn query_budget_for_gap(b: &BudgetParams, n: usize, gap: f64) -> Result<u64> {
    b.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let step_delta = if b.per_bit_delta { b.delta } else { b.delta / n as f64 };
    let eps = b.epsilon.min(gap / 2.0);
    let signal = b.alpha * eps * (1.0 - b.p);
    let q = HOEFFDING_C * (1.0 / step_delta).ln() / (b.ensemble * signal * signal);
    if !q.is_finite() || q >= u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    Ok((q.ceil() as u64).max(1))
}

/// Query budget for step `j` at `θ = π/2` with the prefix decoupled, where
/// `|Δτ_j| = (1/√2)^(n-1-j)`.
pub fn query_budget(b: &BudgetParams, n: usize, j: usize) -> Result<u64> {
    check_data_index(j, n)?;
    let gap = std::f64::consts::FRAC_1_SQRT_2.powi((n - 1 - j) as i32);
    query_budget_for_gap(b, n, gap)
}

/// What the learner asks the hidden-function circuit for in one step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepQuery {
    pub j: usize,
    pub decoupled: Vec<usize>,
    pub corrections: Vec<usize>,
    pub theta: f64,
    pub observables: Observables,
    pub ensemble: u64,
    pub queries: u64,
}

/// Access to the probing circuit without access to `s`.
pub trait ParityOracle {
    fn n(&self) -> usize;
    fn query(&mut self, q: &StepQuery) -> Result<EstimateRecord>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// Noiseless expectations.
    Exact,
    /// Finite-ensemble shot sampling around the noiseless values.
    Sampled,
}

/// The quantum oracle holding the hidden string.
#[derive(Clone, Debug)]
pub struct HiddenParityOracle {
    s: BitString,
    cfg: Dqc1Config,
    noise: NoiseSpec,
    readout: Readout,
    calls: u64,
}

impl HiddenParityOracle {
    pub fn new(s: BitString, cfg: Dqc1Config, readout: Readout) -> Result<Self> {
        cfg.validate()?;
        if s.len() != cfg.n {
            return Err(Error::LengthMismatch {
                left: s.len(),
                right: cfg.n,
            });
        }
        Ok(Self {
            s,
            cfg,
            noise: NoiseSpec::default(),
            readout,
            calls: 0,
        })
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Result<Self> {
        noise.validate()?;
        self.noise = noise;
        Ok(self)
    }

    /// Readout rate combining the configured `p` with the extra readout noise.
    fn readout_rate(&self) -> f64 {
        1.0 - (1.0 - self.cfg.p) * (1.0 - self.noise.p_readout)
    }

    fn noiseless(&self, q: &StepQuery) -> Result<(f64, f64)> {
        let learner = step_block(
            self.cfg.n,
            q.theta + self.noise.theta_error,
            self.noise.phi,
            q.j,
            &q.decoupled,
            &q.corrections,
        )?;
        let p = self.readout_rate();
        match self.cfg.backend {
            Backend::ClosedForm => {
                let block = &learner * &parity_product(&self.s);
                let damping = (1.0 - self.noise.q_mid).powi(self.s.weight() as i32);
                let cfg = Dqc1Config { p, ..self.cfg };
                Ok(attenuated(&cfg, block.normalized_trace() * damping))
            }
            Backend::Dense => {
                let mut stages = vec![
                    Stage::ProbeHadamard,
                    Stage::Controlled(build_parity_unitary(&self.s)?),
                ];
                if self.noise.q_mid > 0.0 {
                    stages.push(Stage::Depolarize {
                        rate: self.noise.q_mid,
                        targets: data_targets(self.cfg.n),
                    });
                }
                stages.push(Stage::Controlled(learner.to_operator()?));
                readout(&simulate(&self.cfg, &stages)?, p)
            }
        }
    }
}

impl ParityOracle for HiddenParityOracle {
    fn n(&self) -> usize {
        self.cfg.n
    }

    fn query(&mut self, q: &StepQuery) -> Result<EstimateRecord> {
        let (ex, ey) = self.noiseless(q)?;
        let call = self.calls;
        self.calls += 1;
        match self.readout {
            Readout::Exact => Ok(EstimateRecord::exact(
                if q.observables.measures_x() { ex } else { 0.0 },
                if q.observables.measures_y() { ey } else { 0.0 },
            )),
            Readout::Sampled => {
                let cfg = self.cfg.with_seed(rng::derive_seed(self.cfg.seed, &[call]));
                sample_observables(&cfg, ex, ey, q.ensemble, q.queries, q.observables)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerState {
    /// Next data qubit to probe.
    pub j: usize,
    pub decided: Vec<bool>,
    /// Qubits already removed from the rotation.
    pub decoupled: Vec<usize>,
    /// Quadrature expected to carry the next nonzero reading, once pinned.
    pub phase: Option<Observables>,
}

impl LearnerState {
    fn new() -> Self {
        Self {
            j: 0,
            decided: Vec::new(),
            decoupled: Vec::new(),
            phase: None,
        }
    }

    fn corrections(&self) -> Vec<usize> {
        self.decoupled.iter().copied().filter(|&k| self.decided[k]).collect()
    }

    pub fn phase_known(&self) -> bool {
        self.phase.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub j: usize,
    pub observables: Observables,
    pub estimate: EstimateRecord,
    pub threshold: f64,
    pub queries: u64,
    pub bit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnOutcome {
    pub estimate: BitString,
    pub steps: Vec<StepRecord>,
}

impl LearnOutcome {
    pub fn total_queries(&self) -> u64 {
        self.steps.iter().fold(0u64, |acc, s| acc.saturating_add(s.queries))
    }
}

fn swap_quadrature(o: Observables) -> Observables {
    match o {
        Observables::X => Observables::Y,
        Observables::Y => Observables::X,
        Observables::Both => Observables::Both,
    }
}

/// Recover the hidden string bit by bit through `oracle`.
pub fn learn<O: ParityOracle + ?Sized>(
    oracle: &mut O,
    cfg: &Dqc1Config,
    budget: &BudgetParams,
) -> Result<LearnOutcome> {
    cfg.validate()?;
    budget.validate()?;
    let n = cfg.n;
    if oracle.n() != n {
        return Err(Error::LengthMismatch {
            left: oracle.n(),
            right: n,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if cfg.alpha <= 0.0 {
        return Err(Error::InvalidParameter("learning needs alpha > 0".into()));
    }

    let half = cfg.theta / 2.0;
    if half.sin().abs().min(half.cos().abs()) < GAP_TOL {
        return Err(Error::InvalidParameter(format!(
            "theta = {} leaves no trace gap; it must not be a multiple of pi",
            cfg.theta
        )));
    }

    let ensemble = budget.ensemble.min(u64::MAX as f64) as u64;
    let mut state = LearnerState::new();
    let mut steps = Vec::with_capacity(n);
    for j in 0..n {
        state.j = j;
        let gap = min_gap(n, cfg.theta, j);
        let threshold = cfg.alpha * (1.0 - cfg.p) * gap / 2.0;
        if threshold.is_nan() || threshold <= 1e-300 {
            return Err(Error::InvalidParameter(format!(
                "theta = {} leaves no trace gap; it must not be a multiple of pi",
                cfg.theta
            )));
        }
        let queries = match budget.queries_override {
            Some(q) => q,
            None => query_budget_for_gap(budget, n, gap)?,
        };
        if let Some(cap) = budget.max_queries {
            if queries > cap {
                return Err(Error::BudgetExhausted {
                    index: j,
                    required: queries,
                    cap,
                });
            }
        }
        let observables = state.phase.unwrap_or(Observables::Both);
        let query = StepQuery {
            j,
            decoupled: state.decoupled.clone(),
            corrections: state.corrections(),
            theta: cfg.theta,
            observables,
            ensemble,
            queries,
        };
        let estimate = oracle.query(&query)?;
        let bit = decide_bit(&estimate, threshold)?;
        state.phase = match (state.phase, bit) {
            // a decoupled one changes the parity of the rotated weight
            (Some(o), true) => Some(swap_quadrature(o)),
            (None, false) => Some(if estimate.ex.abs() >= estimate.ey.abs() {
                Observables::X
            } else {
                Observables::Y
            }),
            (phase, _) => phase,
        };
        state.decided.push(bit);
        state.decoupled.push(j);
        steps.push(StepRecord {
            j,
            observables,
            estimate,
            threshold,
            queries,
            bit,
        });
    }
    Ok(LearnOutcome {
        estimate: BitString::new(state.decided)?,
        steps,
    })
}

/// Exhaustive search for the candidate with the fewest disagreements; ties go
/// to the lexicographically smallest candidate.
pub fn brute_force_baseline(samples: &[(BitString, bool)], n: usize) -> Result<BitString> {
    if !(1..=20).contains(&n) {
        return Err(Error::InvalidParameter(format!("baseline supports 1..=20 bits, got {n}")));
    }
    let encoded: Vec<(u32, bool)> = samples
        .iter()
        .map(|(x, y)| {
            if x.len() != n {
                return Err(Error::LengthMismatch { left: x.len(), right: n });
            }
            Ok((x.index() as u32, *y))
        })
        .collect::<Result<_>>()?;
    let (_, best) = (0u32..1 << n)
        .into_par_iter()
        .map(|cand| {
            let misses = encoded
                .iter()
                .filter(|&&(x, y)| ((cand & x).count_ones() & 1 == 1) != y)
                .count();
            (misses, cand)
        })
        .min()
        .expect("at least one candidate");
    BitString::from_index(n, best as u64)
}
