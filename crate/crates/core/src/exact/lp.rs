// SPDX-License-Identifier: Apache-2.0

//! Single-level model with price-selection binaries `v_i_m` and purchase
//! binaries `x_i_k`:
//!
//! ```text
//! max  sum_{k,i,m} b_m * v_i_m * x_i_k
//! s.t. onep_i:    sum_m v_i_m <= 1
//!      onec_k:    sum_i x_i_k <= 1
//!      link_k_i:  x_i_k - sum_{m: b_m <= b^k} v_i_m <= 0
//!      pref_k_i:  sum_j s_j^k x_j_k - s_i^k sum_{m: b_m <= b^k} v_i_m >= 0
//! ```
//!
//! The `link` and `pref` sums run over the prices customer `k` can afford, so
//! a purchase implies affordability and an affordable better product forces
//! a purchase at least as preferred. Names are 1-based. A product a customer cannot buy has its `x` fixed to 0
//! and no `pref` row.

use std::fmt::Write as _;

use crate::model::{BudgetGrid, Instance, Money};

/// 0-based variable handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarId {
    /// `v[product][grid index]`
    V(usize, usize),
    /// `x[product][customer]`
    X(usize, usize),
}

impl VarId {
    pub fn name(self) -> String {
        match self {
            VarId::V(i, m) => format!("v_{}_{}", i + 1, m + 1),
            VarId::X(i, k) => format!("x_{}_{}", i + 1, k + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowFamily {
    OnePrice,
    OneChoice,
    Link,
    Preference,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub family: RowFamily,
    pub terms: Vec<(i64, VarId)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Row {
    pub fn lhs(&self, value: impl Fn(VarId) -> i64) -> i64 {
        self.terms.iter().map(|&(c, v)| c * value(v)).sum()
    }

    pub fn satisfied(&self, value: impl Fn(VarId) -> i64) -> bool {
        let lhs = self.lhs(value);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilpModel {
    pub name: String,
    pub num_products: usize,
    pub num_customers: usize,
    pub v_vars: Vec<VarId>,
    pub x_vars: Vec<VarId>,
    /// `(coefficient, v, x)` products.
    pub objective: Vec<(Money, VarId, VarId)>,
    pub rows: Vec<Row>,
    /// `x` variables fixed to zero.
    pub fixed_zero: Vec<VarId>,
}

impl MilpModel {
    pub fn build(inst: &Instance, grid: &BudgetGrid) -> Self {
        let ni = inst.num_products();
        let nk = inst.num_customers();
        let nm = grid.len();

        let v_vars: Vec<VarId> =
            (0..ni).flat_map(|i| (0..nm).map(move |m| VarId::V(i, m))).collect();
        let x_vars: Vec<VarId> =
            (0..ni).flat_map(|i| (0..nk).map(move |k| VarId::X(i, k))).collect();

        let mut objective = Vec::with_capacity(ni * nk * nm);
        for k in 0..nk {
            for i in 0..ni {
                if inst.score(k, i).is_none() {
                    continue;
                }
                for m in 0..nm {
                    objective.push((grid.value(m), VarId::V(i, m), VarId::X(i, k)));
                }
            }
        }

        let price_set = |i: usize, coef: i64| (0..nm).map(move |m| (coef, VarId::V(i, m)));
        // grid points 0..affordable(k) are within customer k's budget
        let affordable = |k: usize| grid.values().partition_point(|&b| b <= inst.budget(k));
        let affordable_set =
            |i: usize, k: usize, coef: i64| (0..affordable(k)).map(move |m| (coef, VarId::V(i, m)));
        let mut rows = Vec::new();
        for i in 0..ni {
            rows.push(Row {
                name: format!("onep_{}", i + 1),
                family: RowFamily::OnePrice,
                terms: price_set(i, 1).collect(),
                sense: Sense::Le,
                rhs: 1,
            });
        }
        for k in 0..nk {
            rows.push(Row {
                name: format!("onec_{}", k + 1),
                family: RowFamily::OneChoice,
                terms: (0..ni).map(|i| (1, VarId::X(i, k))).collect(),
                sense: Sense::Le,
                rhs: 1,
            });
        }
        for k in 0..nk {
            for i in 0..ni {
                let mut terms = vec![(1, VarId::X(i, k))];
                terms.extend(affordable_set(i, k, -1));
                rows.push(Row {
                    name: format!("link_{}_{}", k + 1, i + 1),
                    family: RowFamily::Link,
                    terms,
                    sense: Sense::Le,
                    rhs: 0,
                });
            }
        }
        for k in 0..nk {
            for i in 0..ni {
                let Some(s_i) = inst.score(k, i) else { continue };
                let mut terms: Vec<(i64, VarId)> = (0..ni)
                    .filter_map(|j| inst.score(k, j).map(|s| (s as i64, VarId::X(j, k))))
                    .collect();
                terms.extend(affordable_set(i, k, -(s_i as i64)));
                rows.push(Row {
                    name: format!("pref_{}_{}", k + 1, i + 1),
                    family: RowFamily::Preference,
                    terms,
                    sense: Sense::Ge,
                    rhs: 0,
                });
            }
        }

        let fixed_zero = (0..ni)
            .flat_map(|i| (0..nk).map(move |k| (i, k)))
            .filter(|&(i, k)| inst.score(k, i).is_none())
            .map(|(i, k)| VarId::X(i, k))
            .collect();

        MilpModel {
            name: inst.name().to_string(),
            num_products: ni,
            num_customers: nk,
            v_vars,
            x_vars,
            objective,
            rows,
            fixed_zero,
        }
    }

    pub fn row_count(&self, family: RowFamily) -> usize {
        self.rows.iter().filter(|r| r.family == family).count()
    }

    /// Objective value at a 0/1 point.
    pub fn objective_value(&self, value: impl Fn(VarId) -> i64) -> i64 {
        self.objective.iter().map(|&(c, v, x)| c as i64 * value(v) * value(x)).sum()
    }

    /// Names of violated rows and bounds at a 0/1 point.
    pub fn violations(&self, value: impl Fn(VarId) -> i64) -> Vec<String> {
        let mut out: Vec<String> =
            self.rows.iter().filter(|r| !r.satisfied(&value)).map(|r| r.name.clone()).collect();
        out.extend(self.fixed_zero.iter().filter(|&&v| value(v) != 0).map(|v| v.name()));
        out
    }

    /// CPLEX LP text. Output depends only on the model, so it is byte-stable.
    pub fn to_lp_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "\\ Problem: {}", self.name);
        let _ = writeln!(
            s,
            "\\ {} products, {} customers; v_i_m = 1 iff product i is priced at budget m",
            self.num_products, self.num_customers
        );
        s.push_str("\\ Unavailable (customer, product) pairs: x fixed to 0 in Bounds, pref row omitted\n");
        s.push_str("Maximize\n obj: [");
        // quadratic terms are written doubled inside [ ] / 2
        for (n, (c, v, x)) in self.objective.iter().enumerate() {
            if n > 0 {
                s.push_str(" +");
            }
            let _ = write!(s, " {} {} * {}", 2 * c, v.name(), x.name());
        }
        s.push_str(" ] / 2\nSubject To\n");
        for row in &self.rows {
            let _ = write!(s, " {}:", row.name);
            for (n, &(c, v)) in row.terms.iter().enumerate() {
                let sign = if c < 0 { "-" } else if n > 0 { "+" } else { "" };
                let mag = c.unsigned_abs();
                if sign.is_empty() {
                    let _ = write!(s, " ");
                } else {
                    let _ = write!(s, " {sign} ");
                }
                if mag == 1 {
                    let _ = write!(s, "{}", v.name());
                } else {
                    let _ = write!(s, "{mag} {}", v.name());
                }
            }
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
            };
            let _ = writeln!(s, " {op} {}", row.rhs);
        }
        if !self.fixed_zero.is_empty() {
            s.push_str("Bounds\n");
            for v in &self.fixed_zero {
                let _ = writeln!(s, " {} = 0", v.name());
            }
        }
        s.push_str("Binaries\n");
        for v in self.v_vars.iter().chain(&self.x_vars) {
            let _ = writeln!(s, " {}", v.name());
        }
        s.push_str("End\n");
        s
    }
}

pub fn export_single_level(inst: &Instance, grid: &BudgetGrid) -> String {
    MilpModel::build(inst, grid).to_lp_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::assign;
    use crate::model::fixtures::*;
    use crate::model::{build_grid, validate_instance, PriceVector, RawInstance};

    #[test]
    fn toy_shape() {
        let inst = toy();
        let model = MilpModel::build(&inst, &build_grid(&inst));
        assert_eq!(model.v_vars.len(), 12);
        assert_eq!(model.x_vars.len(), 16);
        assert_eq!(model.row_count(RowFamily::OnePrice), 2);
        assert_eq!(model.row_count(RowFamily::OneChoice), 8);
        assert_eq!(model.row_count(RowFamily::Link), 16);
        assert_eq!(model.row_count(RowFamily::Preference), 16);
    }

    #[test]
    fn minimal_model() {
        let inst = validate_instance(RawInstance {
            name: "min".into(),
            num_products: 1,
            num_customers: 1,
            budgets: vec![3],
            preferences: vec![vec![Some(1)]],
        })
        .unwrap();
        let model = MilpModel::build(&inst, &build_grid(&inst));
        assert_eq!((model.v_vars.len(), model.x_vars.len()), (1, 1));
        assert_eq!(model.rows.len(), 4);
        let text = model.to_lp_string();
        assert!(text.contains("obj: [ 6 v_1_1 * x_1_1 ] / 2"), "{text}");
        assert!(text.contains(" pref_1_1: x_1_1 - v_1_1 >= 0"), "{text}");
        assert!(text.contains(" link_1_1: x_1_1 - v_1_1 <= 0"), "{text}");
    }

    fn indicator(grid: &BudgetGrid, p: &PriceVector, chosen: &[Option<usize>]) -> impl Fn(VarId) -> i64 {
        let idx = p.indices().to_vec();
        let chosen = chosen.to_vec();
        let _ = grid;
        move |v| match v {
            VarId::V(i, m) => i64::from(idx[i] == m),
            VarId::X(i, k) => i64::from(chosen[k] == Some(i)),
        }
    }

    #[test]
    fn optimum_is_feasible() {
        let inst = toy();
        let grid = build_grid(&inst);
        let model = MilpModel::build(&inst, &grid);
        let p = prices(&grid, &[50, 34]);
        let a = assign(&inst, &grid, &p);
        let value = indicator(&grid, &p, &a.chosen);
        assert!(model.violations(&value).is_empty());
        assert_eq!(model.objective_value(&value), 236);
    }

    #[test]
    fn non_preferred_choice_violates_pref_row() {
        let inst = toy();
        let grid = build_grid(&inst);
        let model = MilpModel::build(&inst, &grid);
        let p = prices(&grid, &[50, 34]);
        let mut chosen = assign(&inst, &grid, &p).chosen;
        // customer 2 prefers product 1 at 50 but is forced onto product 2
        chosen[1] = Some(1);
        let bad = model.violations(indicator(&grid, &p, &chosen));
        assert_eq!(bad, vec!["pref_2_1".to_string()]);
    }

    #[test]
    fn unaffordable_purchase_violates_link_row() {
        let inst = toy();
        let grid = build_grid(&inst);
        let model = MilpModel::build(&inst, &grid);
        let p = prices(&grid, &[50, 34]);
        let mut chosen = assign(&inst, &grid, &p).chosen;
        // customer 1 (budget 18) cannot pay 50
        chosen[0] = Some(0);
        assert_eq!(model.violations(indicator(&grid, &p, &chosen)), vec!["link_1_1".to_string()]);
    }

    #[test]
    fn absent_pairs_fixed() {
        let inst = toy_fill();
        let model = MilpModel::build(&inst, &build_grid(&inst));
        assert_eq!(model.fixed_zero, vec![VarId::X(1, 4)]);
        assert_eq!(model.row_count(RowFamily::Preference), 15);
        let text = model.to_lp_string();
        assert!(text.contains("Bounds\n x_2_5 = 0\n"));
    }
}
