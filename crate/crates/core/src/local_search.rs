// SPDX-License-Identifier: Apache-2.0

//! Structural local searches over a price vector and its assignment.
//!
//! `slack`, `fill`, `reassignment` and `conditional_reassignment` exploit the
//! argmax structure of the customer response; `opt_based` is the plain
//! coordinate scan over grid values. Every step returns a pair with
//! `assignment == assign(prices)` and revenue no lower than its input.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::eval::assign;
use crate::model::{Assignment, BudgetGrid, Instance, Money, PriceVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Slack,
    Fill,
    Reassign,
    CondReassign,
    OptBased,
}

impl Step {
    pub fn letter(self) -> char {
        match self {
            Step::Slack => 's',
            Step::Fill => 'f',
            Step::Reassign => 'r',
            Step::CondReassign => 'c',
            Step::OptBased => 'o',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            's' => Step::Slack,
            'f' => Step::Fill,
            'r' => Step::Reassign,
            'c' => Step::CondReassign,
            'o' => Step::OptBased,
            _ => return None,
        })
    }

    fn needs_slack_free(self) -> bool {
        matches!(self, Step::Reassign | Step::CondReassign)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown local search letter {0:?} (expected one of s, f, r, c, o)")]
pub struct PipelineParseError(pub char);

/// Ordered local-search steps, spelled as a letter string such as `"sfrc"`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pipeline {
    steps: Vec<Step>,
}

impl Pipeline {
    pub fn new(steps: Vec<Step>) -> Self {
        Pipeline { steps }
    }

    /// Slack, fill, reassignment, conditional reassignment.
    pub fn sfrc() -> Self {
        Pipeline::new(vec![Step::Slack, Step::Fill, Step::Reassign, Step::CondReassign])
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn uses_rng(&self) -> bool {
        self.steps.contains(&Step::OptBased)
    }
}

impl FromStr for Pipeline {
    type Err = PipelineParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "-" || s.eq_ignore_ascii_case("none") {
            return Ok(Pipeline::default());
        }
        s.chars()
            .map(|c| Step::from_letter(c.to_ascii_lowercase()).ok_or(PipelineParseError(c)))
            .collect::<Result<Vec<_>, _>>()
            .map(Pipeline::new)
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return f.write_str("none");
        }
        for step in &self.steps {
            write!(f, "{}", step.letter())?;
        }
        Ok(())
    }
}

/// Counters accumulated across local-search calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LocalSearchStats {
    /// `assign` calls made by local searches.
    pub evaluations: u64,
    pub fill_reverts: u64,
    /// Fill moves that pulled a customer away from another product.
    pub fill_poaching: u64,
    pub reassign_reverts: u64,
    pub cond_reassign_reverts: u64,
    pub opt_based_accepts: u64,
}

impl LocalSearchStats {
    pub fn reverts(&self) -> u64 {
        self.fill_reverts + self.reassign_reverts + self.cond_reassign_reverts
    }

    pub fn merge(&mut self, other: &LocalSearchStats) {
        self.evaluations += other.evaluations;
        self.fill_reverts += other.fill_reverts;
        self.fill_poaching += other.fill_poaching;
        self.reassign_reverts += other.reassign_reverts;
        self.cond_reassign_reverts += other.cond_reassign_reverts;
        self.opt_based_accepts += other.opt_based_accepts;
    }
}

/// Local-search context for one instance.
#[derive(Debug)]
pub struct LocalSearch<'a> {
    inst: &'a Instance,
    grid: &'a BudgetGrid,
    pub stats: LocalSearchStats,
}

impl<'a> LocalSearch<'a> {
    pub fn new(inst: &'a Instance, grid: &'a BudgetGrid) -> Self {
        LocalSearch { inst, grid, stats: LocalSearchStats::default() }
    }

    fn eval(&mut self, p: &PriceVector) -> Assignment {
        self.stats.evaluations += 1;
        assign(self.inst, self.grid, p)
    }

    // Grid index of a budget value; budgets are always on the grid.
    fn index(&self, value: Money) -> usize {
        self.grid.index_of(value).expect("budget lies on the grid")
    }

    /// Raises each sold product's price to the smallest budget among its
    /// buyers. Purchases are unchanged.
    pub fn slack(&mut self, mut p: PriceVector, a: Assignment) -> (PriceVector, Assignment) {
        let mut min_budget: Vec<Option<Money>> = vec![None; self.inst.num_products()];
        for (k, choice) in a.chosen.iter().enumerate() {
            if let Some(i) = *choice {
                let b = self.inst.budget(k);
                min_budget[i] = Some(min_budget[i].map_or(b, |m: Money| m.min(b)));
            }
        }
        let mut changed = false;
        for (i, m) in min_budget.into_iter().enumerate() {
            if let Some(b) = m {
                let idx = self.index(b);
                if idx != p.indices()[i] {
                    p.indices_mut()[i] = idx;
                    changed = true;
                }
            }
        }
        if !changed {
            return (p, a);
        }
        let next = self.eval(&p);
        debug_assert_eq!(next.chosen, a.chosen);
        (p, next)
    }

    /// Prices each unsold product at the smallest budget among unassigned
    /// customers who would consider it; keeps the move only if revenue rises.
    pub fn fill(&mut self, mut p: PriceVector, mut a: Assignment) -> (PriceVector, Assignment) {
        for target in 0..self.inst.num_products() {
            if a.chosen.contains(&Some(target)) {
                continue;
            }
            let lowest = a
                .chosen
                .iter()
                .enumerate()
                .filter(|(k, c)| c.is_none() && self.inst.score(*k, target).is_some())
                .map(|(k, _)| self.inst.budget(k))
                .min();
            let Some(lowest) = lowest else { continue };
            let idx = self.index(lowest);
            if idx == p.indices()[target] {
                continue;
            }
            let old = p.indices()[target];
            p.indices_mut()[target] = idx;
            let next = self.eval(&p);
            if next.revenue > a.revenue {
                let poached = a
                    .chosen
                    .iter()
                    .zip(&next.chosen)
                    .any(|(before, after)| before.is_some() && *after == Some(target));
                if poached {
                    self.stats.fill_poaching += 1;
                }
                a = next;
            } else {
                p.indices_mut()[target] = old;
                self.stats.fill_reverts += 1;
            }
        }
        (p, a)
    }

    /// Tries lifting each product with two or more buyers to its
    /// second-cheapest buyer's budget.
    pub fn reassignment(&mut self, p: PriceVector, a: Assignment) -> (PriceVector, Assignment) {
        self.lift_second_cheapest(p, a, false)
    }

    /// Like [`reassignment`](Self::reassignment), but only when the poorest
    /// buyer has another acceptable product priced exactly at their budget.
    pub fn conditional_reassignment(
        &mut self,
        p: PriceVector,
        a: Assignment,
    ) -> (PriceVector, Assignment) {
        self.lift_second_cheapest(p, a, true)
    }

    fn lift_second_cheapest(
        &mut self,
        mut p: PriceVector,
        mut a: Assignment,
        conditional: bool,
    ) -> (PriceVector, Assignment) {
        for i in 0..self.inst.num_products() {
            let mut buyers: Vec<(Money, usize)> = a
                .chosen
                .iter()
                .enumerate()
                .filter(|(_, c)| **c == Some(i))
                .map(|(k, _)| (self.inst.budget(k), k))
                .collect();
            if buyers.len() < 2 {
                continue;
            }
            buyers.sort_unstable();
            let (poorest_budget, poorest) = buyers[0];
            let second = buyers[1].0;
            let current = p.price(self.grid, i);
            if conditional {
                if poorest_budget != current {
                    continue;
                }
                let has_fallback = (0..self.inst.num_products()).any(|j| {
                    j != i
                        && p.price(self.grid, j) == poorest_budget
                        && self.inst.score(poorest, j).is_some()
                });
                if !has_fallback {
                    continue;
                }
            }
            if second <= current {
                continue;
            }
            let old = p.indices()[i];
            p.indices_mut()[i] = self.index(second);
            let next = self.eval(&p);
            if next.revenue > a.revenue {
                a = next;
            } else {
                p.indices_mut()[i] = old;
                if conditional {
                    self.stats.cond_reassign_reverts += 1;
                } else {
                    self.stats.reassign_reverts += 1;
                }
            }
        }
        (p, a)
    }

    /// Coordinate scan with first improvement, visiting products in random order.
    pub fn opt_based<R: Rng + ?Sized>(
        &mut self,
        p: PriceVector,
        a: Assignment,
        rng: &mut R,
    ) -> (PriceVector, Assignment) {
        let mut order: Vec<usize> = (0..self.inst.num_products()).collect();
        order.shuffle(rng);
        self.opt_based_ordered(p, a, &order, |_, _| {})
    }

    /// Coordinate scan over a fixed product order, first improvement, each
    /// product rescanned until it is locally optimal. `on_accept` sees every
    /// kept vector and its revenue.
    pub fn opt_based_ordered(
        &mut self,
        mut p: PriceVector,
        mut a: Assignment,
        order: &[usize],
        mut on_accept: impl FnMut(&PriceVector, Money),
    ) -> (PriceVector, Assignment) {
        for &i in order {
            // rescan until no value of product i improves
            let mut improved = true;
            while improved {
                improved = false;
                for m in 0..self.grid.len() {
                    let old = p.indices()[i];
                    if m == old {
                        continue;
                    }
                    p.indices_mut()[i] = m;
                    let next = self.eval(&p);
                    if next.revenue > a.revenue {
                        a = next;
                        improved = true;
                        self.stats.opt_based_accepts += 1;
                        on_accept(&p, a.revenue);
                    } else {
                        p.indices_mut()[i] = old;
                    }
                }
            }
        }
        (p, a)
    }

    /// Applies the pipeline steps in order. Reassignment steps get a
    /// preliminary slack pass when the pipeline has no slack step.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        pipeline: &Pipeline,
        mut p: PriceVector,
        mut a: Assignment,
        rng: &mut R,
    ) -> (PriceVector, Assignment) {
        let mut slack_free = pipeline.steps.contains(&Step::Slack);
        for &step in &pipeline.steps {
            if step.needs_slack_free() && !slack_free {
                (p, a) = self.slack(p, a);
                slack_free = true;
            }
            (p, a) = match step {
                Step::Slack => self.slack(p, a),
                Step::Fill => self.fill(p, a),
                Step::Reassign => self.reassignment(p, a),
                Step::CondReassign => self.conditional_reassignment(p, a),
                Step::OptBased => self.opt_based(p, a, rng),
            };
        }
        (p, a)
    }
}

pub fn slack(
    inst: &Instance,
    grid: &BudgetGrid,
    p: PriceVector,
    a: Assignment,
) -> (PriceVector, Assignment) {
    LocalSearch::new(inst, grid).slack(p, a)
}

pub fn fill(
    inst: &Instance,
    grid: &BudgetGrid,
    p: PriceVector,
    a: Assignment,
) -> (PriceVector, Assignment) {
    LocalSearch::new(inst, grid).fill(p, a)
}

pub fn reassignment(
    inst: &Instance,
    grid: &BudgetGrid,
    p: PriceVector,
    a: Assignment,
) -> (PriceVector, Assignment) {
    LocalSearch::new(inst, grid).reassignment(p, a)
}

pub fn conditional_reassignment(
    inst: &Instance,
    grid: &BudgetGrid,
    p: PriceVector,
    a: Assignment,
) -> (PriceVector, Assignment) {
    LocalSearch::new(inst, grid).conditional_reassignment(p, a)
}

pub fn opt_based<R: Rng + ?Sized>(
    inst: &Instance,
    grid: &BudgetGrid,
    p: PriceVector,
    a: Assignment,
    rng: &mut R,
) -> (PriceVector, Assignment) {
    LocalSearch::new(inst, grid).opt_based(p, a, rng)
}

/// Runs the pipeline over every batch element, preserving batch order.
///
/// Without an `o` step the elements are independent and processed in
/// parallel; with one, they share `rng` and run sequentially.
pub fn run_pipeline<R: Rng + ?Sized>(
    inst: &Instance,
    grid: &BudgetGrid,
    pipeline: &Pipeline,
    batch: Vec<(PriceVector, Assignment)>,
    rng: &mut R,
) -> (Vec<(PriceVector, Assignment)>, LocalSearchStats) {
    let mut ls = LocalSearch::new(inst, grid);
    if pipeline.is_empty() {
        return (batch, ls.stats);
    }
    if pipeline.uses_rng() {
        let out = batch.into_iter().map(|(p, a)| ls.run(pipeline, p, a, rng)).collect();
        return (out, ls.stats);
    }
    use rand::SeedableRng;
    use rayon::prelude::*;
    let results: Vec<_> = batch
        .into_par_iter()
        .map(|(p, a)| {
            let mut local = LocalSearch::new(inst, grid);
            // no step draws from it
            let mut unused = rand_chacha::ChaCha8Rng::seed_from_u64(0);
            let out = local.run(pipeline, p, a, &mut unused);
            (out, local.stats)
        })
        .collect();
    let mut out = Vec::with_capacity(results.len());
    for (pair, stats) in results {
        ls.stats.merge(&stats);
        out.push(pair);
    }
    (out, ls.stats)
}
