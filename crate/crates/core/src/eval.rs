// SPDX-License-Identifier: Apache-2.0

//! Closed-form lower level: every customer buys the most preferred product
//! they can afford, or nothing.

use crate::model::{Assignment, BudgetGrid, Instance, Money, PriceVector};

/// Revenue-maximizing response of all customers to a grid price vector.
pub fn assign(inst: &Instance, grid: &BudgetGrid, p: &PriceVector) -> Assignment {
    debug_assert_eq!(p.len(), inst.num_products());
    let prices = p.prices(grid);
    assign_prices(inst, &prices)
}

/// Same as [`assign`] for arbitrary (possibly off-grid) prices.
pub fn assign_prices(inst: &Instance, prices: &[Money]) -> Assignment {
    let mut chosen = Vec::with_capacity(inst.num_customers());
    let mut revenue = 0;
    for k in 0..inst.num_customers() {
        let budget = inst.budget(k);
        let pick = inst.ranking(k).iter().copied().find(|&i| prices[i] <= budget);
        if let Some(i) = pick {
            revenue += prices[i];
        }
        chosen.push(pick);
    }
    Assignment { chosen, revenue }
}

/// Literal enumeration of the `I + 1` options of every customer's purchase
/// problem. Slow; kept as an independent cross-check of [`assign`].
pub fn assign_oracle(inst: &Instance, grid: &BudgetGrid, p: &PriceVector) -> Assignment {
    assign_prices_oracle(inst, &p.prices(grid))
}

pub fn assign_prices_oracle(inst: &Instance, prices: &[Money]) -> Assignment {
    let mut chosen = Vec::with_capacity(inst.num_customers());
    for k in 0..inst.num_customers() {
        // option `None` buys nothing and has utility 0
        let mut best: (u64, Option<usize>) = (0, None);
        for (i, &price) in prices.iter().enumerate() {
            let Some(score) = inst.score(k, i) else { continue };
            let affordable = price <= inst.budget(k);
            if affordable && score > best.0 {
                best = (score, Some(i));
            }
        }
        chosen.push(best.1);
    }
    let revenue = chosen.iter().flatten().map(|&i| prices[i]).sum();
    Assignment { chosen, revenue }
}

/// Number of price-vector evaluations performed by a search run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct EvalCount(pub u64);

/// [`assign`] bound to an instance, counting calls.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    inst: &'a Instance,
    grid: &'a BudgetGrid,
    count: EvalCount,
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a Instance, grid: &'a BudgetGrid) -> Self {
        Evaluator { inst, grid, count: EvalCount::default() }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn grid(&self) -> &'a BudgetGrid {
        self.grid
    }

    pub fn evaluate(&mut self, p: &PriceVector) -> Assignment {
        self.count.0 += 1;
        assign(self.inst, self.grid, p)
    }

    pub fn count(&self) -> EvalCount {
        self.count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{build_grid, validate_instance, RawInstance};

    fn revenue_at(inst: &Instance, prices_: &[Money]) -> Money {
        let grid = build_grid(inst);
        assign(inst, &grid, &prices(&grid, prices_)).revenue
    }

    #[test]
    fn toy_spot_values() {
        let inst = toy();
        assert_eq!(revenue_at(&inst, &[50, 34]), 236);
        assert_eq!(revenue_at(&inst, &[34, 34]), 204);
        assert_eq!(revenue_at(&inst, &[18, 27]), 180);
        assert_eq!(revenue_at(&inst, &[42, 42]), 210);
        assert_eq!(revenue_at(&inst, &[42, 34]), 228);
        assert_eq!(revenue_at(&inst, &[50, 42]), 226);
        assert_eq!(revenue_at(&inst, &[42, 27]), 234);
    }

    #[test]
    fn toy_buyers_at_34_34() {
        let inst = toy();
        let grid = build_grid(&inst);
        let a = assign(&inst, &grid, &prices(&grid, &[34, 34]));
        assert_eq!(a.buyers(0), vec![1, 5, 6]);
        assert_eq!(a.buyers(1), vec![3, 4, 7]);
        assert_eq!(a.chosen[0], None);
        assert_eq!(a.chosen[2], None);
    }

    // Hand enumeration at (50, 50): customers 2 and 6 take product 1 and
    // customer 5 takes product 2; nobody else can afford 50.
    #[test]
    fn toy_50_50_in_lowest_band() {
        let inst = toy();
        let r = revenue_at(&inst, &[50, 50]);
        assert_eq!(r, 150);
        assert!((130..=152).contains(&r));
    }

    #[test]
    fn nothing_affordable() {
        let inst = toy();
        let a = assign_prices(&inst, &[67, 100]);
        assert!(a.chosen.iter().all(Option::is_none));
        assert_eq!(a.revenue, 0);
    }

    #[test]
    fn single_customer_single_product() {
        let inst = validate_instance(RawInstance {
            name: "one".into(),
            num_products: 1,
            num_customers: 1,
            budgets: vec![10],
            preferences: vec![vec![Some(1)]],
        })
        .unwrap();
        let grid = build_grid(&inst);
        let p = PriceVector::new(vec![0]);
        let a = assign_oracle(&inst, &grid, &p);
        assert_eq!(a.chosen, vec![Some(0)]);
        assert_eq!(a.revenue, 10);
        assert_eq!(assign(&inst, &grid, &p), a);
    }

    #[test]
    fn absent_products_never_chosen() {
        let inst = toy_fill();
        let a = assign_prices(&inst, &[66, 18]);
        assert_eq!(a.chosen[4], Some(0));
        assert_eq!(a.revenue, 240);
    }

    #[test]
    fn evaluator_counts() {
        let inst = toy();
        let grid = build_grid(&inst);
        let mut ev = Evaluator::new(&inst, &grid);
        let p = prices(&grid, &[50, 34]);
        ev.evaluate(&p);
        ev.evaluate(&p);
        assert_eq!(ev.count(), EvalCount(2));
    }
}
