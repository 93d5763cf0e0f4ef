// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rankprice_core::{validate_instance, Instance, Money, RawInstance};

pub fn toy_raw() -> RawInstance {
    RawInstance {
        name: "toy".into(),
        num_products: 2,
        num_customers: 8,
        budgets: vec![18, 66, 27, 34, 66, 50, 42, 42],
        preferences: [(2, 1), (2, 1), (1, 2), (1, 2), (1, 2), (2, 1), (2, 1), (1, 2)]
            .iter()
            .map(|&(a, b)| vec![Some(a), Some(b)])
            .collect(),
    }
}

pub fn toy() -> Instance {
    validate_instance(toy_raw()).unwrap()
}

/// Customer 5 can only buy product 1.
pub fn toy_fill() -> Instance {
    let mut raw = toy_raw();
    raw.preferences[4] = vec![Some(2), None];
    validate_instance(raw).unwrap()
}

/// Revenue straight from the definition: every customer picks the highest
/// score among affordable products.
pub fn revenue_oracle(inst: &Instance, prices: &[Money]) -> Money {
    (0..inst.num_customers())
        .filter_map(|k| {
            (0..inst.num_products())
                .filter(|&i| prices[i] <= inst.budget(k))
                .filter_map(|i| inst.score(k, i).map(|s| (s, prices[i])))
                .max()
                .map(|(_, price)| price)
        })
        .sum()
}

/// Exhaustive grid optimum computed without the library's enumerator.
pub fn grid_optimum_oracle(inst: &Instance) -> Money {
    let mut grid: Vec<Money> = inst.budgets().to_vec();
    grid.sort_unstable();
    grid.dedup();
    let n = inst.num_products();
    let mut idx = vec![0usize; n];
    let mut best = 0;
    loop {
        let prices: Vec<Money> = idx.iter().map(|&m| grid[m]).collect();
        best = best.max(revenue_oracle(inst, &prices));
        let Some(pos) = (0..n).rev().find(|&p| idx[p] + 1 < grid.len()) else {
            return best;
        };
        idx[pos] += 1;
        idx[pos + 1..].iter_mut().for_each(|v| *v = 0);
    }
}

/// Random instance with at most `max_distinct` distinct budgets drawn from
/// `1..=100` and product availability `avail`.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    products: usize,
    customers: usize,
    max_distinct: usize,
    avail: f64,
) -> Instance {
    let distinct = rng.random_range(1..=max_distinct);
    let pool: Vec<i64> = (0..distinct).map(|_| rng.random_range(1..=100)).collect();
    let budgets: Vec<i64> = (0..customers).map(|_| *pool.choose(rng).unwrap()).collect();
    let preferences = (0..customers)
        .map(|_| {
            let mut row: Vec<Option<i64>> = vec![None; products];
            let mut available: Vec<usize> = (0..products).filter(|_| rng.random_bool(avail)).collect();
            if available.is_empty() {
                available.push(rng.random_range(0..products));
            }
            let mut scores: Vec<i64> = (1..=available.len() as i64).map(|s| s * 3).collect();
            scores.shuffle(rng);
            for (&i, s) in available.iter().zip(scores) {
                row[i] = Some(s);
            }
            row
        })
        .collect();
    validate_instance(RawInstance {
        name: "random".into(),
        num_products: products,
        num_customers: customers,
        budgets,
        preferences,
    })
    .unwrap()
}

/// `random_instance` with sizes drawn from `products` and `customers`.
pub fn random_sized<R: Rng>(
    rng: &mut R,
    products: std::ops::RangeInclusive<usize>,
    customers: std::ops::RangeInclusive<usize>,
    max_distinct: usize,
    avail: f64,
) -> Instance {
    let i = rng.random_range(products);
    let k = rng.random_range(customers);
    random_instance(rng, i, k, max_distinct, avail)
}
