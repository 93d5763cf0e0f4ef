// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::init::initial_population;
use super::{SearchOutcome, SearchParams, SearchState};
use crate::model::{BudgetGrid, Instance, PriceVector};

/// Box of grid vectors within `radius` index steps of a center in every
/// coordinate, clipped to the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    lo: Vec<usize>,
    hi: Vec<usize>,
}

pub fn neighborhood(grid: &BudgetGrid, p: &PriceVector, radius: usize) -> Neighborhood {
    let top = grid.len() - 1;
    let lo = p.indices().iter().map(|&m| m.saturating_sub(radius)).collect();
    let hi = p.indices().iter().map(|&m| m.saturating_add(radius).min(top)).collect();
    Neighborhood { lo, hi }
}

impl Neighborhood {
    /// Inclusive index range of product `i`.
    pub fn range(&self, i: usize) -> (usize, usize) {
        (self.lo[i], self.hi[i])
    }

    pub fn contains(&self, q: &PriceVector) -> bool {
        q.len() == self.lo.len()
            && q.indices().iter().enumerate().all(|(i, &m)| self.lo[i] <= m && m <= self.hi[i])
    }

    /// Number of points, saturating.
    pub fn size(&self) -> u64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(1u64, |acc, (lo, hi)| acc.saturating_mul((hi - lo + 1) as u64))
    }

    /// Uniform draw from the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PriceVector {
        PriceVector::new(
            self.lo.iter().zip(&self.hi).map(|(&lo, &hi)| rng.random_range(lo..=hi)).collect(),
        )
    }

    /// Every point, lexicographic order.
    pub fn points(&self) -> Vec<PriceVector> {
        let mut out = Vec::new();
        let mut cur = self.lo.clone();
        loop {
            out.push(PriceVector::new(cur.clone()));
            let mut i = cur.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < self.hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = self.lo[i];
            }
        }
    }
}

/// `count` points, each drawn uniformly from the radius-`radius` box of a
/// uniformly chosen elite.
pub fn vns_batch<R: Rng + ?Sized>(
    grid: &BudgetGrid,
    elites: &[&PriceVector],
    radius: usize,
    count: usize,
    rng: &mut R,
) -> Vec<PriceVector> {
    (0..count)
        .map(|_| {
            let center = elites[rng.random_range(0..elites.len())];
            neighborhood(grid, center, radius).sample(rng)
        })
        .collect()
}

/// Variable neighborhood search. On a batch without improvement the radius
/// grows by one, up to `M - 1`; after an improvement it stays put unless
/// `params.reset_radius` is set.
pub fn vns_search<R: Rng + ?Sized>(
    inst: &Instance,
    grid: &BudgetGrid,
    params: &SearchParams,
    rng: &mut R,
) -> SearchOutcome {
    let mut state = SearchState::new(inst, grid, params);
    seed_population(&mut state, params, rng);
    let max_radius = grid.len().saturating_sub(1).max(1);

    while !state.done() {
        let n = state.batch_size(params.t);
        let batch = {
            let elites = state.population.elite_vectors();
            vns_batch(grid, &elites, state.radius, n, rng)
        };
        let improved = state.absorb(batch, true, rng);
        if improved {
            if params.reset_radius {
                state.radius = 1;
            }
        } else {
            state.radius = (state.radius + 1).min(max_radius);
        }
        state.iterations += 1;
        state.snapshot();
    }
    state.finish()
}

/// Initial population, evaluated without local search.
pub(super) fn seed_population<R: Rng + ?Sized>(
    state: &mut SearchState<'_>,
    params: &SearchParams,
    rng: &mut R,
) {
    let count = state.batch_size(params.l0).max(1);
    let initial = initial_population(state.instance(), state.grid(), params.init, count, rng);
    state.absorb(initial, false, rng);
    state.snapshot();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::assign;
    use crate::heuristics::{InitKind, Population, StopRule};
    use crate::model::build_grid;
    use crate::model::fixtures::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radius_one_around_50_50() {
        let grid = build_grid(&toy());
        let n = neighborhood(&grid, &prices(&grid, &[50, 50]), 1);
        assert_eq!(n.size(), 9);
        let pts: Vec<Vec<u64>> = n.points().iter().map(|p| p.prices(&grid)).collect();
        for a in [42, 50, 66] {
            for b in [42, 50, 66] {
                assert!(pts.contains(&vec![a, b]));
            }
        }
    }

    #[test]
    fn clamped_at_lower_edge() {
        let grid = build_grid(&toy());
        let n = neighborhood(&grid, &prices(&grid, &[18, 18]), 1);
        let pts: Vec<Vec<u64>> = n.points().iter().map(|p| p.prices(&grid)).collect();
        assert_eq!(pts, vec![vec![18, 18], vec![18, 27], vec![27, 18], vec![27, 27]]);
    }

    #[test]
    fn large_radius_covers_grid() {
        let grid = build_grid(&toy());
        let n = neighborhood(&grid, &prices(&grid, &[34, 50]), 5);
        assert_eq!(n.size(), 36);
    }

    #[test]
    fn samples_stay_in_box() {
        let grid = build_grid(&toy());
        let center = prices(&grid, &[66, 27]);
        let n = neighborhood(&grid, &center, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            assert!(n.contains(&n.sample(&mut rng)));
        }
    }

    // Replays the two-iteration worked example with its known populations.
    #[test]
    fn worked_example_replay() {
        let inst = toy();
        let grid = build_grid(&inst);
        let initial: [[u64; 2]; 10] = [
            [66, 27],
            [27, 66],
            [50, 18],
            [18, 18],
            [18, 66],
            [34, 18],
            [66, 66],
            [66, 50],
            [27, 27],
            [18, 42],
        ];
        let mut pop = Population::new(3, false);
        for p in initial {
            let p = prices(&grid, &p);
            let r = assign(&inst, &grid, &p).revenue;
            pop.push(p, r);
        }
        assert_eq!(pop.best_value(), Some(228));
        let elites: Vec<Vec<u64>> = pop.elite_vectors().iter().map(|p| p.prices(&grid)).collect();
        let mut sorted = elites.clone();
        sorted.sort();
        assert_eq!(sorted, vec![vec![27, 66], vec![50, 18], vec![66, 27]]);

        // first batch, all inside radius-1 boxes of the elites
        let batch: [[u64; 2]; 6] = [[50, 34], [50, 27], [66, 18], [27, 50], [42, 18], [18, 50]];
        let boxes: Vec<Neighborhood> =
            pop.elite_vectors().iter().map(|p| neighborhood(&grid, p, 1)).collect();
        for p in batch {
            let p = prices(&grid, &p);
            assert!(boxes.iter().any(|b| b.contains(&p)));
            let r = assign(&inst, &grid, &p).revenue;
            pop.push(p, r);
        }
        assert_eq!(pop.len(), 16);
        assert_eq!(pop.best_value(), Some(236));
        assert_eq!(pop.best().unwrap().prices.prices(&grid), vec![50, 34]);
        let elites: Vec<Vec<u64>> = pop.elite_vectors().iter().map(|p| p.prices(&grid)).collect();
        assert_eq!(elites, vec![vec![50, 34], vec![50, 27], vec![66, 27]]);
    }

    fn small(stop: StopRule) -> SearchParams {
        SearchParams { l0: 10, q: 3, t: 6, stop, ..SearchParams::vns_defaults() }
    }

    #[test]
    fn zero_iterations_returns_best_initial() {
        let inst = toy();
        let grid = build_grid(&inst);
        let p = small(StopRule::Iterations(0));
        let out = vns_search(&inst, &grid, &p, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(out.evals, 10);
        assert_eq!(out.iterations, 0);
        let pop = initial_population(&inst, &grid, InitKind::Random, 10, &mut ChaCha8Rng::seed_from_u64(3));
        let best = pop.iter().map(|q| assign(&inst, &grid, q).revenue).max().unwrap();
        assert_eq!(out.best_value, best);
    }

    #[test]
    fn point_budget_is_exact() {
        let inst = toy();
        let grid = build_grid(&inst);
        let out = vns_search(&inst, &grid, &small(StopRule::MaxPoints(25)), &mut ChaCha8Rng::seed_from_u64(8));
        assert_eq!(out.evals, 25);
        let evals: Vec<u64> = out.trace.iter().map(|t| t.evals).collect();
        assert_eq!(evals, vec![10, 16, 22, 25]);
    }

    #[test]
    fn two_iterations() {
        let inst = toy();
        let grid = build_grid(&inst);
        let out = vns_search(&inst, &grid, &small(StopRule::Iterations(2)), &mut ChaCha8Rng::seed_from_u64(8));
        assert_eq!(out.evals, 22);
        assert_eq!(out.trace.len(), 3);
        assert!(out.best_value <= 236);
    }

    #[test]
    fn radius_grows_and_caps() {
        // 200 random starts contain the optimum, so no batch can improve
        let inst = toy();
        let grid = build_grid(&inst);
        for (iters, radius) in [(0, 1), (3, 4), (10, 5)] {
            let params = SearchParams { l0: 200, q: 5, t: 4, stop: StopRule::Iterations(iters), ..SearchParams::vns_defaults() };
            let out = vns_search(&inst, &grid, &params, &mut ChaCha8Rng::seed_from_u64(1));
            assert_eq!(out.trace[0].best_value, 236);
            assert_eq!(out.final_radius, radius);
        }
    }
}
