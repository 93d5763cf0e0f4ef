// SPDX-License-Identifier: Apache-2.0

//! Repeated seeded runs of one configuration, with CSV reports.

mod generate;
mod run;
mod stats;

pub use generate::{generate_instance, InvalidRange};
pub use run::{
    run_experiment, run_once, ExperimentConfig, ExperimentError, ExperimentReport, ParamsConfig, RunSummary,
    StopConfig,
};
pub use stats::{nearest_rank, summarize, Checkpoint, Distribution, EmptyInput, EvolutionStats};
