//! Exact simulation of probabilistic teleportation over partially entangled
//! channels: statevectors, parameterized measurement bases, protocol outcome
//! trees, closed-form success rates and a seeded Monte Carlo sampler.
//!
//! Qubit 0 is the most significant bit of an amplitude index.

pub mod analytics;
pub mod bases;
pub mod engine;
pub mod error;
pub mod gates;
pub mod matrix;
pub mod mc;
pub mod numeric;
pub mod protocols;
pub mod statevec;
pub mod sweep;
pub mod teleport;

pub use analytics::{eval_formula, FormulaId, NoiseParams};
pub use bases::{BasisParam, BasisSet};
pub use engine::Execution;
pub use error::{Error, Result};
pub use mc::{mc_run, McConfig, McEstimate};
pub use protocols::{ProtocolId, ProtocolReport, RunOptions, RunParams};
pub use statevec::{InputQubit, StateVector};
pub use teleport::{ChannelParam, OutcomeBranch};
