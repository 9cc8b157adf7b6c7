//! Parameter sweeps over a grid of channel parameters.

use serde::Serialize;

use crate::analytics::{self, Group, NoiseParams};
use crate::engine::Execution;
use crate::error::{Error, Result};
use crate::mc::{self, McConfig};
use crate::protocols::{self, ProtocolId, RunOptions, RunParams};
use crate::statevec::InputQubit;

/// How each grid point is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepMode {
    /// Exact enumeration (subject to the branch budget).
    Exact,
    /// Monte Carlo sampling.
    Mc(McConfig),
    /// Closed forms only, for `q` beyond what enumeration can reach.
    Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: f64,
    pub q: Option<u32>,
    pub direct: Option<f64>,
    pub corrected: Option<f64>,
    pub formula: Option<f64>,
    pub abs_diff: Option<f64>,
    pub p_hat: Option<f64>,
    pub std_err: Option<f64>,
    /// Efficiency-weighted success, for the three single-step groups.
    pub noisy: Option<f64>,
}

/// `start, start + step, …` up to and including `stop` when it lies on the
/// grid. Points are rounded to 12 decimals so `0.1 * 3` prints as `0.3`.
pub fn n_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&start) {
        return Err(Error::OutOfRange {
            name: "start",
            value: start,
        });
    }
    if !(start..=1.0).contains(&stop) {
        return Err(Error::OutOfRange {
            name: "stop",
            value: stop,
        });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::OutOfRange {
            name: "step",
            value: step,
        });
    }
    let k = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=k)
        .map(|i| (((start + i as f64 * step) * 1e12).round() / 1e12).min(1.0))
        .collect())
}

fn group_of(id: ProtocolId) -> Option<Group> {
    match id {
        ProtocolId::Group1 => Some(Group::One),
        ProtocolId::Group2 => Some(Group::Two),
        ProtocolId::Group3 => Some(Group::Three),
        _ => None,
    }
}

fn point(
    id: ProtocolId,
    n: f64,
    q: Option<u32>,
    input: &InputQubit,
    mode: &SweepMode,
    noise: Option<&NoiseParams>,
    inner: Execution,
) -> Result<SweepRow> {
    let params = RunParams::new(*input, n, q)?;
    let expected = protocols::expected(id, n, q)?;
    let noisy = match (noise, group_of(id)) {
        (Some(noise), Some(g)) => Some(analytics::noisy_success(g, n, noise)?),
        _ => None,
    };
    let mut row = SweepRow {
        n,
        q,
        direct: None,
        corrected: None,
        formula: expected.corrected,
        abs_diff: None,
        p_hat: None,
        std_err: None,
        noisy,
    };
    match mode {
        SweepMode::Exact => {
            let opts = RunOptions {
                keep_branches: false,
                execution: inner,
                ..RunOptions::default()
            };
            let report = protocols::run(id, &params, &opts)?;
            row.direct = Some(report.direct_success);
            row.corrected = Some(report.corrected_success);
            row.abs_diff = report.corrected_diff();
        }
        SweepMode::Mc(cfg) => {
            let est = mc::mc_run_with(id.name(), &params, cfg, inner)?;
            row.p_hat = Some(est.p_hat);
            row.std_err = Some(est.std_err);
        }
        SweepMode::Formula => {
            row.direct = expected.direct;
            row.corrected = expected.corrected;
        }
    }
    Ok(row)
}

/// One row per grid point, in grid order.
pub fn sweep(
    id: ProtocolId,
    grid: &[f64],
    q: Option<u32>,
    input: &InputQubit,
    mode: SweepMode,
    noise: Option<NoiseParams>,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    let eval = |&n: &f64| {
        point(
            id,
            n,
            q,
            input,
            &mode,
            noise.as_ref(),
            Execution::Sequential,
        )
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return grid.par_iter().map(eval).collect();
    }
    let _ = exec;
    grid.iter().map(eval).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(n_grid(0.0, 1.0, 0.5).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(n_grid(0.3, 0.3, 0.1).unwrap(), vec![0.3]);
        let g = n_grid(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert!(n_grid(0.5, 0.2, 0.1).is_err());
        assert!(n_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn group1_sweep() {
        let g = n_grid(0.0, 1.0, 0.5).unwrap();
        let rows = sweep(
            ProtocolId::Group1,
            &g,
            None,
            &InputQubit::default(),
            SweepMode::Exact,
            None,
            Execution::Parallel,
        )
        .unwrap();
        let c: Vec<f64> = rows.iter().map(|r| r.corrected.unwrap()).collect();
        assert_eq!(c[0], 0.0);
        assert!((c[1] - 0.4).abs() < 1e-12);
        assert_eq!(c[2], 1.0);
    }
}
