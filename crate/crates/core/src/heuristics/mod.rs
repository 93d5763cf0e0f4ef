// SPDX-License-Identifier: Apache-2.0

//! Population-based searches over the budget grid.
//!
//! All three methods share the same skeleton: build an initial population,
//! then repeatedly derive a batch of new price vectors from the elite set,
//! evaluate them, optionally polish them with a local-search pipeline, and
//! merge them back. They differ only in how a batch is generated.

mod genetic;
mod init;
mod naive;
mod population;
mod vns;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::local_search::{LocalSearchStats, Pipeline, PipelineParseError};
use crate::model::{BudgetGrid, Instance, Money, PriceVector};

pub use genetic::{crossover, crossover_with_mask, genetic_search, mutate};
pub use init::{greedy_init, initial_population, random_price};
pub use naive::naive_search;
pub use population::{Member, Population, SearchState};
pub use vns::{neighborhood, vns_batch, vns_search, Neighborhood};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Vns,
    Genetic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Vns => "vns",
            Method::Genetic => "genetic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(Method::Naive),
            "vns" => Ok(Method::Vns),
            "genetic" | "gen" => Ok(Method::Genetic),
            _ => Err(ParamError::UnknownMethod(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    #[default]
    Random,
    Greedy,
}

impl InitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InitKind::Random => "random",
            InitKind::Greedy => "greedy",
        }
    }
}

impl fmt::Display for InitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InitKind {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(InitKind::Random),
            "greedy" => Ok(InitKind::Greedy),
            _ => Err(ParamError::UnknownInit(s.to_string())),
        }
    }
}

/// When a run stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Total number of points inserted into the population, initial ones included.
    MaxPoints(u64),
    /// Wall clock over the whole run, checked once per batch.
    TimeLimit(Duration),
    /// Number of loop iterations after initialization.
    Iterations(u64),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("l0 must be at least 1")]
    EmptyPopulation,
    #[error("q must be at least 1")]
    EmptyElite,
    #[error("q ({q}) must not exceed l0 ({l0})")]
    EliteTooLarge { q: usize, l0: usize },
    #[error("t must be at least 1")]
    EmptyBatch,
    #[error("the naive method does not run local searches")]
    NaiveWithLocalSearch,
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("unknown init {0:?}")]
    UnknownInit(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineParseError),
}

/// Search configuration shared by all methods.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    /// Initial population size.
    pub l0: usize,
    /// Elite set size.
    pub q: usize,
    /// Batch size per iteration. The naive method uses it as its snapshot interval.
    pub t: usize,
    pub stop: StopRule,
    pub init: InitKind,
    pub seed: u64,
    pub local_search: Pipeline,
    /// Skip generated points already present in the population.
    pub dedup: bool,
    /// Reset the VNS radius to 1 after an improving batch.
    pub reset_radius: bool,
    /// Allow the same elite to be both genetic parents.
    pub parents_with_replacement: bool,
}

impl SearchParams {
    /// Defaults for VNS: `L0 = 1000`, `Q = 100`, `T = 500`.
    pub fn vns_defaults() -> Self {
        SearchParams {
            l0: 1000,
            q: 100,
            t: 500,
            stop: StopRule::MaxPoints(24_000),
            init: InitKind::Random,
            seed: 0,
            local_search: Pipeline::default(),
            dedup: false,
            reset_radius: false,
            parents_with_replacement: false,
        }
    }

    /// Defaults for the genetic method: `L0 = 1000`, `Q = 1000`, `T = 500`.
    pub fn genetic_defaults() -> Self {
        SearchParams { q: 1000, ..Self::vns_defaults() }
    }

    pub fn defaults_for(method: Method) -> Self {
        match method {
            Method::Genetic => Self::genetic_defaults(),
            Method::Naive | Method::Vns => Self::vns_defaults(),
        }
    }

    pub fn validate(&self, method: Method) -> Result<(), ParamError> {
        if self.l0 == 0 {
            return Err(ParamError::EmptyPopulation);
        }
        if self.q == 0 {
            return Err(ParamError::EmptyElite);
        }
        if self.q > self.l0 {
            return Err(ParamError::EliteTooLarge { q: self.q, l0: self.l0 });
        }
        if self.t == 0 {
            return Err(ParamError::EmptyBatch);
        }
        if method == Method::Naive && !self.local_search.is_empty() {
            return Err(ParamError::NaiveWithLocalSearch);
        }
        Ok(())
    }
}

/// Best-so-far snapshot taken after each evaluated batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TracePoint {
    /// Points in the population so far.
    pub evals: u64,
    pub elapsed: Duration,
    pub best_value: Money,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: PriceVector,
    pub best_value: Money,
    pub trace: Vec<TracePoint>,
    /// Points inserted into the population.
    pub evals: u64,
    pub iterations: u64,
    /// VNS radius at termination; 1 for the other methods.
    pub final_radius: usize,
    pub elapsed: Duration,
    pub local_search: LocalSearchStats,
}

impl SearchOutcome {
    /// `(evals, best_value)` pairs; the timing-free part of the trace.
    pub fn trace_values(&self) -> Vec<(u64, Money)> {
        self.trace.iter().map(|t| (t.evals, t.best_value)).collect()
    }
}

/// Dispatches to the requested method.
pub fn search<R: Rng + ?Sized>(
    method: Method,
    inst: &Instance,
    grid: &BudgetGrid,
    params: &SearchParams,
    rng: &mut R,
) -> Result<SearchOutcome, ParamError> {
    params.validate(method)?;
    Ok(match method {
        Method::Naive => naive_search(inst, grid, params, rng),
        Method::Vns => vns_search(inst, grid, params, rng),
        Method::Genetic => genetic_search(inst, grid, params, rng),
    })
}
