// SPDX-License-Identifier: Apache-2.0

//! Rank pricing: choose one price per product to maximize revenue from
//! unit-demand customers who buy their favourite affordable product.

pub mod eval;
pub mod exact;
pub mod experiment;
pub mod heuristics;
pub mod local_search;
pub mod model;

pub use eval::{assign, assign_prices, EvalCount, Evaluator};
pub use exact::{brute_force, export_single_level, BruteForce, ExactError, MilpModel};
pub use experiment::{generate_instance, run_experiment, summarize, ExperimentConfig, RunSummary};
pub use heuristics::{search, InitKind, Method, ParamError, SearchOutcome, SearchParams, StopRule, TracePoint};
pub use local_search::{LocalSearch, LocalSearchStats, Pipeline, Step};
pub use model::{
    build_grid, validate_instance, Assignment, BudgetGrid, DisplayPrices, Instance, ModelError, Money,
    PriceVector, RawInstance, Score,
};
