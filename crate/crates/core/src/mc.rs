//! Seeded Monte Carlo trajectories.
//!
//! Worker `w` draws from ChaCha8 seeded with `seed` on stream `w` and runs a
//! fixed share of the samples (`samples / workers`, the first
//! `samples % workers` workers take one more). Counts are summed, so the
//! estimate depends only on `(seed, workers, samples)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{Execution, Plan, Sampler};
use crate::error::{Error, Result};
use crate::protocols::{self, ProtocolId, RunParams};
use crate::statevec::InputQubit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64, workers: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidArgument("samples must be positive".into()));
        }
        if workers == 0 {
            return Err(Error::InvalidArgument("workers must be positive".into()));
        }
        Ok(McConfig {
            samples,
            seed,
            workers,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub successes: u64,
    pub samples: u64,
    pub p_hat: f64,
    pub std_err: f64,
}

impl McEstimate {
    fn from_counts(successes: u64, samples: u64) -> Self {
        let p_hat = successes as f64 / samples as f64;
        McEstimate {
            successes,
            samples,
            p_hat,
            std_err: (p_hat * (1.0 - p_hat) / samples as f64).sqrt(),
        }
    }

    /// `|p_hat - exact|` in units of the standard error. Infinite when the
    /// estimate has zero spread and misses.
    pub fn z_score(&self, exact: f64) -> f64 {
        let d = (self.p_hat - exact).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_err
        }
    }
}

/// Samples a registered protocol; exact-enumeration budgets do not apply.
pub fn mc_run(protocol_name: &str, params: &RunParams, config: &McConfig) -> Result<McEstimate> {
    mc_run_with(protocol_name, params, config, Execution::Parallel)
}

pub fn mc_run_with(
    protocol_name: &str,
    params: &RunParams,
    config: &McConfig,
    exec: Execution,
) -> Result<McEstimate> {
    let id: ProtocolId = protocol_name.parse()?;
    let config = McConfig::new(config.samples, config.seed, config.workers)?;
    let plan = protocols::sampling_plan(id, params)?;
    let counts = run_workers(&plan, &params.input, &config, exec)?;
    Ok(McEstimate::from_counts(counts, config.samples))
}

fn allotment(config: &McConfig, w: usize) -> u64 {
    let workers = config.workers as u64;
    config.samples / workers + u64::from((w as u64) < config.samples % workers)
}

fn worker(plan: &Plan, input: &InputQubit, config: &McConfig, w: usize) -> Result<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(w as u64);
    let mut uniform = || rng.random::<f64>();
    let mut sampler = Sampler::new(plan, input);
    let mut hits = 0;
    for _ in 0..allotment(config, w) {
        if sampler.draw(&mut uniform)?.success {
            hits += 1;
        }
    }
    Ok(hits)
}

#[cfg(feature = "parallel")]
fn run_workers(plan: &Plan, input: &InputQubit, config: &McConfig, exec: Execution) -> Result<u64> {
    use rayon::prelude::*;
    if exec.is_parallel() {
        (0..config.workers)
            .into_par_iter()
            .map(|w| worker(plan, input, config, w))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    } else {
        (0..config.workers)
            .map(|w| worker(plan, input, config, w))
            .sum()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_workers(
    plan: &Plan,
    input: &InputQubit,
    config: &McConfig,
    _exec: Execution,
) -> Result<u64> {
    (0..config.workers)
        .map(|w| worker(plan, input, config, w))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: f64, q: Option<u32>) -> RunParams {
        RunParams::new(InputQubit::default(), n, q).unwrap()
    }

    #[test]
    fn ideal_channel_always_succeeds() {
        let cfg = McConfig::new(1000, 7, 3).unwrap();
        let e = mc_run("group1", &params(1.0, None), &cfg).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.std_err, 0.0);
    }

    #[test]
    fn allotments_cover_all_samples() {
        let cfg = McConfig::new(10, 1, 4).unwrap();
        let total: u64 = (0..4).map(|w| allotment(&cfg, w)).sum();
        assert_eq!(total, 10);
        assert_eq!(allotment(&cfg, 0), 3);
        assert_eq!(allotment(&cfg, 3), 2);
    }

    #[test]
    fn deterministic_and_execution_independent() {
        let cfg = McConfig::new(20_000, 42, 4).unwrap();
        let p = params(0.5, None);
        let a = mc_run_with("group3", &p, &cfg, Execution::Parallel).unwrap();
        let b = mc_run_with("group3", &p, &cfg, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert!(a.z_score(0.32) < 4.0);
    }

    #[test]
    fn validation() {
        assert!(McConfig::new(0, 1, 1).is_err());
        assert!(McConfig::new(1, 1, 0).is_err());
        let cfg = McConfig {
            samples: 10,
            seed: 1,
            workers: 1,
        };
        assert!(matches!(
            mc_run("nope", &params(0.5, None), &cfg),
            Err(Error::UnknownProtocol { .. })
        ));
    }
}
