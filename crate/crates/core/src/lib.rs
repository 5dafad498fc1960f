//! Simulation and learning primitives for one-clean-qubit parity estimation
//! under full depolarization of the data register.
//!
//! Qubit 0 is the probe and the most significant tensor factor. Data qubit
//! `k` (0-based) is register qubit `k + 1`.

mod error;

pub mod circuits;
pub mod dqc1;
pub mod infomeasures;
pub mod lpn;
pub mod noise;
pub mod qstate;
pub mod rng;

pub use circuits::{BitString, ProductOperator, RotationShape, RotationSpec};
pub use dqc1::{Backend, Dqc1Config, EstimateRecord, Observables, Stage};
pub use error::{Error, Result};
pub use infomeasures::{DiscordOptions, DiscordResult};
pub use lpn::{BudgetParams, HiddenParityOracle, LearnOutcome, ParityOracle, Readout, StepQuery, StepRecord};
pub use noise::NoiseSpec;
pub use qstate::{CMatrix, CVector, DensityMatrix, KrausSet, OperatorMatrix};
