// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::Rng;

use super::{SearchOutcome, SearchParams, StopRule, TracePoint};
use crate::eval::Evaluator;
use crate::local_search::LocalSearch;
use crate::model::{BudgetGrid, Instance, Money, PriceVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub prices: PriceVector,
    pub revenue: Money,
}

/// The multiset of evaluated points, with its elite set kept up to date.
///
/// Elites are the `q` highest-revenue members; at equal revenue the earlier
/// insertion ranks higher.
#[derive(Debug, Clone)]
pub struct Population {
    members: Vec<Member>,
    elite_size: usize,
    // member indices, best first
    elites: Vec<usize>,
    seen: Option<HashSet<PriceVector>>,
}

impl Population {
    pub fn new(elite_size: usize, dedup: bool) -> Self {
        Population {
            members: Vec::new(),
            elite_size,
            elites: Vec::with_capacity(elite_size + 1),
            seen: dedup.then(HashSet::new),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn member(&self, index: usize) -> &Member {
        &self.members[index]
    }

    /// Member indices of the elite set, best first.
    pub fn elites(&self) -> &[usize] {
        &self.elites
    }

    pub fn elite_vectors(&self) -> Vec<&PriceVector> {
        self.elites.iter().map(|&e| &self.members[e].prices).collect()
    }

    /// The earliest-inserted member with maximal revenue.
    pub fn best(&self) -> Option<&Member> {
        self.elites.first().map(|&e| &self.members[e])
    }

    pub fn best_value(&self) -> Option<Money> {
        self.best().map(|m| m.revenue)
    }

    /// Records `p` as generated. Returns `false` when deduplicating and `p`
    /// was already seen.
    pub fn mark_seen(&mut self, p: &PriceVector) -> bool {
        match &mut self.seen {
            Some(seen) => seen.insert(p.clone()),
            None => true,
        }
    }

    pub fn distinct_seen(&self) -> Option<usize> {
        self.seen.as_ref().map(HashSet::len)
    }

    pub fn push(&mut self, prices: PriceVector, revenue: Money) {
        if let Some(seen) = &mut self.seen {
            seen.insert(prices.clone());
        }
        let index = self.members.len();
        self.members.push(Member { prices, revenue });

        // new members lose ties, so they go after every elite with revenue >= theirs
        let pos = self.elites.partition_point(|&e| self.members[e].revenue >= revenue);
        if pos < self.elite_size {
            self.elites.insert(pos, index);
            self.elites.truncate(self.elite_size);
        }
    }
}

/// Mutable state of one search run.
#[derive(Debug)]
pub struct SearchState<'a> {
    inst: &'a Instance,
    grid: &'a BudgetGrid,
    params: &'a SearchParams,
    pub population: Population,
    /// Current VNS radius.
    pub radius: usize,
    pub iterations: u64,
    evaluator: Evaluator<'a>,
    local_search: LocalSearch<'a>,
    trace: Vec<TracePoint>,
    start: Instant,
    space_size: Option<u64>,
}

impl<'a> SearchState<'a> {
    pub fn new(inst: &'a Instance, grid: &'a BudgetGrid, params: &'a SearchParams) -> Self {
        SearchState {
            inst,
            grid,
            params,
            population: Population::new(params.q, params.dedup),
            radius: 1,
            iterations: 0,
            evaluator: Evaluator::new(inst, grid),
            local_search: LocalSearch::new(inst, grid),
            trace: Vec::new(),
            start: Instant::now(),
            space_size: grid.space_size(inst.num_products()),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn grid(&self) -> &'a BudgetGrid {
        self.grid
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    /// How many points the next batch may add under a point budget.
    pub fn batch_size(&self, wanted: usize) -> usize {
        match self.params.stop {
            StopRule::MaxPoints(max) => {
                let left = max.saturating_sub(self.population.len() as u64);
                wanted.min(usize::try_from(left).unwrap_or(usize::MAX))
            }
            _ => wanted,
        }
    }

    /// Whether the stopping rule has fired. Also true once deduplicated
    /// sampling has seen the whole grid.
    pub fn done(&self) -> bool {
        if let (Some(seen), Some(space)) = (self.population.distinct_seen(), self.space_size) {
            if seen as u64 >= space {
                return true;
            }
        }
        match self.params.stop {
            StopRule::MaxPoints(max) => self.population.len() as u64 >= max,
            StopRule::TimeLimit(limit) => self.elapsed() >= limit,
            StopRule::Iterations(n) => self.iterations >= n,
        }
    }

    /// Evaluates a batch of generated points, runs the local-search pipeline
    /// on each, and inserts the results. Returns whether the best revenue rose.
    pub fn absorb<R: Rng + ?Sized>(&mut self, batch: Vec<PriceVector>, polish: bool, rng: &mut R) -> bool {
        let before = self.population.best_value();
        for p in batch {
            if !self.population.mark_seen(&p) {
                continue;
            }
            let a = self.evaluator.evaluate(&p);
            let (p, a) = if polish && !self.params.local_search.is_empty() {
                self.local_search.run(&self.params.local_search, p, a, rng)
            } else {
                (p, a)
            };
            self.population.push(p, a.revenue);
        }
        match (before, self.population.best_value()) {
            (None, Some(_)) => true,
            (Some(b), Some(a)) => a > b,
            _ => false,
        }
    }

    pub fn snapshot(&mut self) {
        if let Some(best_value) = self.population.best_value() {
            self.trace.push(TracePoint {
                evals: self.population.len() as u64,
                elapsed: self.elapsed(),
                best_value,
            });
        }
    }

    pub fn finish(self) -> SearchOutcome {
        let best = self.population.best().expect("search evaluated at least one point").clone();
        SearchOutcome {
            best: best.prices,
            best_value: best.revenue,
            evals: self.evaluator.count().0,
            iterations: self.iterations,
            final_radius: self.radius,
            elapsed: self.start.elapsed(),
            trace: self.trace,
            local_search: self.local_search.stats,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_elites(members: &[Member], q: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..members.len()).collect();
        idx.sort_by_key(|&i| (std::cmp::Reverse(members[i].revenue), i));
        idx.truncate(q);
        idx
    }

    #[test]
    fn elites_break_ties_by_insertion() {
        let mut pop = Population::new(2, false);
        pop.push(PriceVector::new(vec![0]), 5);
        pop.push(PriceVector::new(vec![1]), 7);
        pop.push(PriceVector::new(vec![2]), 7);
        pop.push(PriceVector::new(vec![3]), 6);
        assert_eq!(pop.elites(), &[1, 2]);
        assert_eq!(pop.best().unwrap().prices.indices(), &[1]);
    }

    #[test]
    fn dedup_tracks_seen() {
        let mut pop = Population::new(1, true);
        assert!(pop.mark_seen(&PriceVector::new(vec![0, 1])));
        assert!(!pop.mark_seen(&PriceVector::new(vec![0, 1])));
        pop.push(PriceVector::new(vec![2, 2]), 1);
        assert!(!pop.mark_seen(&PriceVector::new(vec![2, 2])));
        assert_eq!(pop.distinct_seen(), Some(2));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn incremental_elites_match_sort(revenues in prop::collection::vec(0u64..20, 1..200), q in 1usize..30) {
                let mut pop = Population::new(q, false);
                for (n, r) in revenues.iter().enumerate() {
                    pop.push(PriceVector::new(vec![n]), *r);
                    let expected = brute_elites(pop.members(), q);
                    prop_assert_eq!(pop.elites(), expected.as_slice());
                }
                let worst_elite = pop.elites().iter().map(|&e| pop.member(e).revenue).min().unwrap();
                for (n, m) in pop.members().iter().enumerate() {
                    if !pop.elites().contains(&n) {
                        prop_assert!(m.revenue <= worst_elite);
                    }
                }
            }
        }
    }
}
