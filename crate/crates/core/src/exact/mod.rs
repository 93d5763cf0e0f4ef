// SPDX-License-Identifier: Apache-2.0

//! Ground truth for small instances: exhaustive search over the budget grid,
//! and an LP-format export of the single-level model for external solvers.

mod lp;

pub use lp::{export_single_level, MilpModel, Row, RowFamily, Sense, VarId};

use rayon::prelude::*;
use thiserror::Error;

use crate::eval::assign_prices;
use crate::model::{BudgetGrid, Instance, Money, PriceVector};

/// Default cap on the number of enumerated vectors.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("search space has {size} vectors, above the cap of {cap}")]
    SearchSpaceTooLarge { size: String, cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub optimum: Money,
    /// Every optimal vector, lexicographically sorted.
    pub optima: Vec<PriceVector>,
    pub evaluated: u64,
}

/// Evaluates all `M^I` grid vectors.
pub fn brute_force(inst: &Instance, grid: &BudgetGrid, cap: u64) -> Result<BruteForce, ExactError> {
    let size = match grid.space_size(inst.num_products()) {
        Some(s) if s <= cap => s,
        Some(s) => return Err(ExactError::SearchSpaceTooLarge { size: s.to_string(), cap }),
        None => {
            return Err(ExactError::SearchSpaceTooLarge {
                size: format!("{}^{}", grid.len(), inst.num_products()),
                cap,
            })
        }
    };
    let m = grid.len();
    let n = inst.num_products();

    // the first coordinate is split across workers; each chunk is enumerated
    // in lexicographic order so concatenating chunks keeps the order
    let chunks: Vec<(Money, Vec<PriceVector>)> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; n];
            idx[0] = first;
            let mut prices: Vec<Money> = idx.iter().map(|&i| grid.value(i)).collect();
            let mut best = 0;
            let mut optima = Vec::new();
            loop {
                let revenue = assign_prices(inst, &prices).revenue;
                if optima.is_empty() || revenue > best {
                    best = revenue;
                    optima.clear();
                    optima.push(PriceVector::new(idx.clone()));
                } else if revenue == best {
                    optima.push(PriceVector::new(idx.clone()));
                }
                // odometer over coordinates 1..n, last fastest
                let mut pos = n;
                loop {
                    if pos <= 1 {
                        return (best, optima);
                    }
                    pos -= 1;
                    if idx[pos] + 1 < m {
                        idx[pos] += 1;
                        prices[pos] = grid.value(idx[pos]);
                        break;
                    }
                    idx[pos] = 0;
                    prices[pos] = grid.value(0);
                }
            }
        })
        .collect();

    let optimum = chunks.iter().map(|(b, _)| *b).max().unwrap_or(0);
    let optima = chunks
        .into_iter()
        .filter(|(b, _)| *b == optimum)
        .flat_map(|(_, v)| v)
        .collect();
    Ok(BruteForce { optimum, optima, evaluated: size })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{build_grid, validate_instance, RawInstance};

    #[test]
    fn toy_optima() {
        let inst = toy();
        let grid = build_grid(&inst);
        let bf = brute_force(&inst, &grid, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(bf.optimum, 236);
        assert_eq!(bf.evaluated, 36);
        let optima: Vec<Vec<Money>> = bf.optima.iter().map(|p| p.prices(&grid)).collect();
        assert_eq!(optima, vec![vec![34, 66], vec![50, 34], vec![66, 34]]);
    }

    #[test]
    fn cap_enforced() {
        let inst = toy();
        let grid = build_grid(&inst);
        assert_eq!(
            brute_force(&inst, &grid, 35),
            Err(ExactError::SearchSpaceTooLarge { size: "36".into(), cap: 35 })
        );
    }

    #[test]
    fn single_product_closed_form() {
        let inst = validate_instance(RawInstance {
            name: "one".into(),
            num_products: 1,
            num_customers: 5,
            budgets: vec![10, 30, 20, 30, 25],
            preferences: vec![vec![Some(1)]; 5],
        })
        .unwrap();
        let grid = build_grid(&inst);
        let closed = grid
            .values()
            .iter()
            .map(|&b| {
                let takers = (0..inst.num_customers())
                    .filter(|&k| inst.budget(k) >= b && inst.score(k, 0).is_some())
                    .count() as Money;
                b * takers
            })
            .max()
            .unwrap();
        let bf = brute_force(&inst, &grid, 100).unwrap();
        assert_eq!(bf.optimum, closed);
        assert_eq!(bf.optimum, 80);
    }
}
