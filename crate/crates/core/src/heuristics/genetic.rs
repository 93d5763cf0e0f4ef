// SPDX-License-Identifier: Apache-2.0

use rand::Rng;
use thiserror::Error;

use super::vns::seed_population;
use super::{SearchOutcome, SearchParams, SearchState};
use crate::model::{BudgetGrid, Instance, PriceVector};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parents have different lengths ({0} and {1})")]
pub struct LengthMismatch(pub usize, pub usize);

/// Uniform crossover: each component comes from `p1` where `take_first` is
/// true, from `p2` otherwise.
pub fn crossover_with_mask(
    p1: &PriceVector,
    p2: &PriceVector,
    take_first: &[bool],
) -> Result<PriceVector, LengthMismatch> {
    if p1.len() != p2.len() {
        return Err(LengthMismatch(p1.len(), p2.len()));
    }
    if take_first.len() != p1.len() {
        return Err(LengthMismatch(p1.len(), take_first.len()));
    }
    Ok(PriceVector::new(
        p1.indices()
            .iter()
            .zip(p2.indices())
            .zip(take_first)
            .map(|((&a, &b), &first)| if first { a } else { b })
            .collect(),
    ))
}

/// Uniform crossover with a fair coin per component.
pub fn crossover<R: Rng + ?Sized>(
    p1: &PriceVector,
    p2: &PriceVector,
    rng: &mut R,
) -> Result<PriceVector, LengthMismatch> {
    let mask: Vec<bool> = (0..p1.len()).map(|_| rng.random_bool(0.5)).collect();
    crossover_with_mask(p1, p2, &mask)
}

/// Each component, with probability `1/I`, moves to a different grid value
/// chosen uniformly.
pub fn mutate<R: Rng + ?Sized>(grid: &BudgetGrid, p: &PriceVector, rng: &mut R) -> PriceVector {
    let n = p.len();
    let m = grid.len();
    let mut out = p.clone();
    if n == 0 {
        return out;
    }
    let rate = 1.0 / n as f64;
    for slot in out.indices_mut() {
        if rng.random_bool(rate) && m > 1 {
            let draw = rng.random_range(0..m - 1);
            *slot = if draw >= *slot { draw + 1 } else { draw };
        }
    }
    out
}

/// Genetic search: each batch member is a mutated crossover of two elites.
/// Parents are distinct unless `params.parents_with_replacement` is set or
/// only one elite exists.
pub fn genetic_search<R: Rng + ?Sized>(
    inst: &Instance,
    grid: &BudgetGrid,
    params: &SearchParams,
    rng: &mut R,
) -> SearchOutcome {
    let mut state = SearchState::new(inst, grid, params);
    seed_population(&mut state, params, rng);

    while !state.done() {
        let n = state.batch_size(params.t);
        let batch = {
            let elites = state.population.elite_vectors();
            (0..n)
                .map(|_| {
                    let (a, b) = pick_parents(elites.len(), params.parents_with_replacement, rng);
                    let child = crossover(elites[a], elites[b], rng).expect("same length");
                    mutate(grid, &child, rng)
                })
                .collect()
        };
        state.absorb(batch, true, rng);
        state.iterations += 1;
        state.snapshot();
    }
    state.finish()
}

fn pick_parents<R: Rng + ?Sized>(n: usize, with_replacement: bool, rng: &mut R) -> (usize, usize) {
    let a = rng.random_range(0..n);
    if with_replacement || n < 2 {
        return (a, rng.random_range(0..n));
    }
    let b = rng.random_range(0..n - 1);
    (a, if b >= a { b + 1 } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::StopRule;
    use crate::model::build_grid;
    use crate::model::fixtures::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_parents() {
        let p = PriceVector::new(vec![3, 1, 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert_eq!(crossover(&p, &p, &mut rng).unwrap(), p);
        }
    }

    #[test]
    fn mask_picks_components() {
        let grid = build_grid(&toy());
        let child =
            crossover_with_mask(&prices(&grid, &[18, 27]), &prices(&grid, &[66, 34]), &[true, false]).unwrap();
        assert_eq!(child.prices(&grid), vec![18, 34]);
    }

    #[test]
    fn length_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = crossover(&PriceVector::new(vec![1]), &PriceVector::new(vec![1, 2]), &mut rng);
        assert_eq!(err, Err(LengthMismatch(1, 2)));
    }

    #[test]
    fn single_value_grid_never_mutates() {
        let grid = BudgetGrid::from_budgets(&[4, 4]);
        let p = PriceVector::new(vec![0, 0, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(mutate(&grid, &p, &mut rng), p);
        }
    }

    #[test]
    fn distinct_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let (a, b) = pick_parents(3, false, &mut rng);
            assert_ne!(a, b);
            assert!(a < 3 && b < 3);
        }
        assert_eq!(pick_parents(1, false, &mut rng), (0, 0));
    }

    #[test]
    fn zero_iterations_returns_best_initial() {
        let inst = toy();
        let grid = build_grid(&inst);
        let p = SearchParams { l0: 10, q: 10, t: 6, stop: StopRule::Iterations(0), ..SearchParams::genetic_defaults() };
        let out = genetic_search(&inst, &grid, &p, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(out.evals, 10);
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace[0].best_value, out.best_value);
    }

    #[test]
    fn deterministic() {
        let inst = toy();
        let grid = build_grid(&inst);
        let p = SearchParams { l0: 10, q: 10, t: 6, stop: StopRule::MaxPoints(100), ..SearchParams::genetic_defaults() };
        let a = genetic_search(&inst, &grid, &p, &mut ChaCha8Rng::seed_from_u64(12));
        let b = genetic_search(&inst, &grid, &p, &mut ChaCha8Rng::seed_from_u64(12));
        assert_eq!(a.trace_values(), b.trace_values());
        assert_eq!(a.best, b.best);
    }
}
