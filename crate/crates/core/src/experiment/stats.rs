// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;
use thiserror::Error;

use crate::heuristics::TracePoint;
use crate::model::Money;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no runs to summarize")]
pub struct EmptyInput;

/// Nearest-rank percentile of an ascending slice: the element at rank
/// `ceil(p / 100 * n)`, ranks starting at 1.
pub fn nearest_rank<T: Copy>(sorted: &[T], p: u32) -> Option<T> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    let rank = (p as usize * n).div_ceil(100).clamp(1, n);
    Some(sorted[rank - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub checkpoint: usize,
    pub evals: u64,
    /// Median elapsed time of the runs' snapshots at this checkpoint.
    pub elapsed_ms: f64,
    pub p5: Money,
    pub p50: Money,
    pub p95: Money,
}

/// Best-so-far percentiles across runs, one row per distinct evaluation count.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvolutionStats {
    pub checkpoints: Vec<Checkpoint>,
}

impl EvolutionStats {
    /// Checkpoints are the union of the runs' snapshot evaluation counts,
    /// starting where every run has its first snapshot. A run's value at a
    /// checkpoint is its last snapshot at or before it.
    pub fn from_traces<'a>(traces: impl IntoIterator<Item = &'a [TracePoint]>) -> Self {
        let traces: Vec<&[TracePoint]> = traces.into_iter().filter(|t| !t.is_empty()).collect();
        let Some(start) = traces.iter().map(|t| t[0].evals).max() else {
            return Self::default();
        };
        let mut evals: Vec<u64> =
            traces.iter().flat_map(|t| t.iter().map(|p| p.evals)).filter(|&e| e >= start).collect();
        evals.sort_unstable();
        evals.dedup();

        let checkpoints = evals
            .into_iter()
            .enumerate()
            .map(|(checkpoint, at)| {
                let points: Vec<&TracePoint> = traces
                    .iter()
                    .map(|t| &t[t.partition_point(|p| p.evals <= at) - 1])
                    .collect();
                let mut values: Vec<Money> = points.iter().map(|p| p.best_value).collect();
                values.sort_unstable();
                let mut times: Vec<f64> = points.iter().map(|p| p.elapsed.as_secs_f64() * 1e3).collect();
                times.sort_by(f64::total_cmp);
                Checkpoint {
                    checkpoint,
                    evals: at,
                    elapsed_ms: nearest_rank(&times, 50).unwrap_or(0.0),
                    p5: nearest_rank(&values, 5).unwrap_or(0),
                    p50: nearest_rank(&values, 50).unwrap_or(0),
                    p95: nearest_rank(&values, 95).unwrap_or(0),
                }
            })
            .collect();
        EvolutionStats { checkpoints }
    }
}

/// Distribution of final values over a set of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub count: usize,
    pub min: Money,
    pub q1: Money,
    pub median: Money,
    pub q3: Money,
    pub max: Money,
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    pub reference: Option<Money>,
    /// Share of runs reaching the reference value.
    pub hit_rate: Option<f64>,
    /// `value / reference` per run, in input order.
    pub ratios: Vec<f64>,
}

/// Quartiles use the nearest-rank rule.
pub fn summarize(values: &[Money], reference: Option<Money>) -> Result<Distribution, EmptyInput> {
    if values.is_empty() {
        return Err(EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let variance = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
    let q = |p| nearest_rank(&sorted, p).expect("nonempty");
    Ok(Distribution {
        count: values.len(),
        min: sorted[0],
        q1: q(25),
        median: q(50),
        q3: q(75),
        max: sorted[sorted.len() - 1],
        mean,
        variance,
        reference,
        hit_rate: reference.map(|r| values.iter().filter(|&&v| v >= r).count() as f64 / n),
        ratios: reference
            .filter(|&r| r > 0)
            .map(|r| values.iter().map(|&v| v as f64 / r as f64).collect())
            .unwrap_or_default(),
    })
}
