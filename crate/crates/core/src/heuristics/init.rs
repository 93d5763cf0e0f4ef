// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::InitKind;
use crate::model::{BudgetGrid, Instance, PriceVector};

/// Each product's price drawn uniformly from the grid.
pub fn random_price<R: Rng + ?Sized>(grid: &BudgetGrid, num_products: usize, rng: &mut R) -> PriceVector {
    let m = grid.len();
    PriceVector::new((0..num_products).map(|_| rng.random_range(0..m)).collect())
}

/// Richest customers first (ties by index): each prices their favourite
/// still-unpriced product at their own budget. Products nobody claimed get
/// the top budget.
pub fn greedy_init(inst: &Instance, grid: &BudgetGrid) -> PriceVector {
    let mut customers: Vec<usize> = (0..inst.num_customers()).collect();
    customers.sort_by_key(|&k| (std::cmp::Reverse(inst.budget(k)), k));

    let mut priced: Vec<Option<usize>> = vec![None; inst.num_products()];
    let mut remaining = inst.num_products();
    for k in customers {
        if remaining == 0 {
            break;
        }
        if let Some(&i) = inst.ranking(k).iter().find(|&&i| priced[i].is_none()) {
            priced[i] = grid.index_of(inst.budget(k));
            remaining -= 1;
        }
    }
    let top = grid.len() - 1;
    PriceVector::new(priced.into_iter().map(|m| m.unwrap_or(top)).collect())
}

/// `count` starting vectors; with greedy init the first one is the greedy vector.
pub fn initial_population<R: Rng + ?Sized>(
    inst: &Instance,
    grid: &BudgetGrid,
    kind: InitKind,
    count: usize,
    rng: &mut R,
) -> Vec<PriceVector> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    if kind == InitKind::Greedy {
        out.push(greedy_init(inst, grid));
    }
    while out.len() < count {
        out.push(random_price(grid, inst.num_products(), rng));
    }
    out
}
