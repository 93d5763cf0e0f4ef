// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::init::random_price;
use super::{SearchOutcome, SearchParams, SearchState};
use crate::model::{BudgetGrid, Instance};

/// Uniform random sampling of the grid, keeping the best point seen.
///
/// Points are drawn in batches of `params.t`; the trace gets one snapshot per
/// batch and the stopping rule is checked between batches. At least one batch
/// always runs.
pub fn naive_search<R: Rng + ?Sized>(
    inst: &Instance,
    grid: &BudgetGrid,
    params: &SearchParams,
    rng: &mut R,
) -> SearchOutcome {
    let mut state = SearchState::new(inst, grid, params);
    loop {
        let n = state.batch_size(params.t).max(usize::from(state.population.is_empty()));
        let batch = (0..n).map(|_| random_price(grid, inst.num_products(), rng)).collect();
        state.absorb(batch, false, rng);
        state.iterations += 1;
        state.snapshot();
        if state.done() && !state.population.is_empty() {
            break;
        }
    }
    state.finish()
}
