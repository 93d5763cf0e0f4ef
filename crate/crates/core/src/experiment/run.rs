// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::stats::EvolutionStats;
use crate::heuristics::{search, InitKind, Method, ParamError, SearchParams, StopRule, TracePoint};
use crate::local_search::{LocalSearchStats, Pipeline};
use crate::model::{build_grid, BudgetGrid, Instance, ModelError, Money};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("cannot read instance {path}: {source}")]
    InstanceRead { path: PathBuf, source: ModelError },
    #[error("cannot write {path}: {source}")]
    OutputWrite { path: PathBuf, source: csv::Error },
    #[error("invalid parameters: {0}")]
    Param(#[from] ParamError),
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopConfig {
    MaxPoints(u64),
    TimeLimitSecs(f64),
    Iterations(u64),
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig::MaxPoints(24_000)
    }
}

impl StopConfig {
    pub fn to_rule(self) -> StopRule {
        match self {
            StopConfig::MaxPoints(n) => StopRule::MaxPoints(n),
            StopConfig::TimeLimitSecs(s) => StopRule::TimeLimit(Duration::from_secs_f64(s.max(0.0))),
            StopConfig::Iterations(n) => StopRule::Iterations(n),
        }
    }
}

/// Search parameters as written in a config file. Missing sizes fall back
/// to the method's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub l0: Option<usize>,
    pub q: Option<usize>,
    pub t: Option<usize>,
    pub stop: StopConfig,
    pub dedup: bool,
    pub reset_radius: bool,
    pub parents_with_replacement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance_path: PathBuf,
    pub method: Method,
    #[serde(default)]
    pub init: InitKind,
    /// Local-search letters, e.g. `"sfrc"`; empty for none.
    #[serde(default)]
    pub pipeline: String,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_runs() -> usize {
    1000
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Parameters for run `run_id`, seeded with `base_seed + run_id`.
    pub fn search_params(&self, run_id: usize) -> Result<SearchParams, ExperimentError> {
        let d = SearchParams::defaults_for(self.method);
        let local_search: Pipeline = self.pipeline.parse().map_err(ParamError::from)?;
        let params = SearchParams {
            l0: self.params.l0.unwrap_or(d.l0),
            q: self.params.q.unwrap_or(d.q),
            t: self.params.t.unwrap_or(d.t),
            stop: self.params.stop.to_rule(),
            init: self.init,
            seed: self.base_seed.wrapping_add(run_id as u64),
            local_search,
            dedup: self.params.dedup,
            reset_radius: self.params.reset_radius,
            parents_with_replacement: self.params.parents_with_replacement,
        };
        params.validate(self.method)?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run_id: usize,
    pub seed: u64,
    pub best_value: Money,
    pub best_prices: Vec<Money>,
    pub evals: u64,
    pub iterations: u64,
    pub elapsed: Duration,
    pub local_search: LocalSearchStats,
    pub trace: Vec<TracePoint>,
}

impl RunSummary {
    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1e3
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    /// Sorted by `run_id`.
    pub runs: Vec<RunSummary>,
    pub evolution: EvolutionStats,
}

impl ExperimentReport {
    pub fn best_values(&self) -> Vec<Money> {
        self.runs.iter().map(|r| r.best_value).collect()
    }
}

/// One seeded run.
pub fn run_once(
    inst: &Instance,
    grid: &BudgetGrid,
    method: Method,
    params: &SearchParams,
    run_id: usize,
) -> Result<RunSummary, ParamError> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let out = search(method, inst, grid, params, &mut rng)?;
    Ok(RunSummary {
        run_id,
        seed: params.seed,
        best_value: out.best_value,
        best_prices: out.best.prices(grid),
        evals: out.evals,
        iterations: out.iterations,
        elapsed: out.elapsed,
        local_search: out.local_search,
        trace: out.trace,
    })
}

/// Runs every seed of `config` and writes `summary.csv`, `trace.csv` and
/// `percentiles.csv` into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    if config.runs == 0 {
        return Err(ExperimentError::NoRuns);
    }
    let inst = Instance::load(&config.instance_path)
        .map_err(|source| ExperimentError::InstanceRead { path: config.instance_path.clone(), source })?;
    let grid = build_grid(&inst);
    let params: Vec<SearchParams> =
        (0..config.runs).map(|j| config.search_params(j)).collect::<Result<_, _>>()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        pool = pool.num_threads(w.max(1));
    }
    let pool = pool.build()?;
    let mut runs: Vec<RunSummary> = pool.install(|| {
        params
            .par_iter()
            .enumerate()
            .map(|(j, p)| run_once(&inst, &grid, config.method, p, j))
            .collect::<Result<_, _>>()
    })?;
    runs.sort_by_key(|r| r.run_id);

    let evolution = EvolutionStats::from_traces(runs.iter().map(|r| r.trace.as_slice()));
    let report = ExperimentReport { runs, evolution };
    write_reports(config, &report)?;
    Ok(report)
}

fn write_reports(config: &ExperimentConfig, report: &ExperimentReport) -> Result<(), ExperimentError> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir)
        .map_err(|e| ExperimentError::OutputWrite { path: dir.clone(), source: e.into() })?;
    let pipeline: Pipeline = config.pipeline.parse().map_err(ParamError::from)?;

    write_csv(&dir.join("summary.csv"), |w| {
        w.write_record(["run_id", "seed", "method", "init", "pipeline", "evals", "elapsed_ms", "best_value", "best_prices"])?;
        for r in &report.runs {
            let prices: Vec<String> = r.best_prices.iter().map(Money::to_string).collect();
            w.write_record([
                r.run_id.to_string(),
                r.seed.to_string(),
                config.method.to_string(),
                config.init.to_string(),
                pipeline.to_string(),
                r.evals.to_string(),
                format!("{:.3}", r.elapsed_ms()),
                r.best_value.to_string(),
                prices.join(" "),
            ])?;
        }
        Ok(())
    })?;

    write_csv(&dir.join("trace.csv"), |w| {
        w.write_record(["run_id", "evals", "elapsed_ms", "best_value"])?;
        for r in &report.runs {
            for t in &r.trace {
                w.write_record([
                    r.run_id.to_string(),
                    t.evals.to_string(),
                    format!("{:.3}", t.elapsed.as_secs_f64() * 1e3),
                    t.best_value.to_string(),
                ])?;
            }
        }
        Ok(())
    })?;

    write_csv(&dir.join("percentiles.csv"), |w| {
        w.write_record(["checkpoint", "evals", "elapsed_ms", "p5", "p50", "p95"])?;
        for c in &report.evolution.checkpoints {
            w.write_record([
                c.checkpoint.to_string(),
                c.evals.to_string(),
                format!("{:.3}", c.elapsed_ms),
                c.p5.to_string(),
                c.p50.to_string(),
                c.p95.to_string(),
            ])?;
        }
        Ok(())
    })
}

fn write_csv(
    path: &Path,
    body: impl FnOnce(&mut csv::Writer<fs::File>) -> csv::Result<()>,
) -> Result<(), ExperimentError> {
    let wrap = |source| ExperimentError::OutputWrite { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    body(&mut w).map_err(wrap)?;
    w.flush().map_err(|e| wrap(e.into()))
}
