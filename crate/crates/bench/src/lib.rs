// SPDX-License-Identifier: Apache-2.0

//! Fixtures and criterion benchmarks for the solvers.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankprice_core::eval::assign;
use rankprice_core::exact::{brute_force, DEFAULT_ENUMERATION_CAP};
use rankprice_core::experiment::generate_instance;
use rankprice_core::heuristics::random_price;
use rankprice_core::local_search::run_pipeline;
use rankprice_core::{
    build_grid, search, validate_instance, BudgetGrid, InitKind, Instance, Method, Pipeline, PriceVector,
    RawInstance, SearchParams, StopRule,
};

/// The 8-customer, 2-product example.
pub fn toy() -> Instance {
    validate_instance(RawInstance {
        name: "toy".into(),
        num_products: 2,
        num_customers: 8,
        budgets: vec![18, 66, 27, 34, 66, 50, 42, 42],
        preferences: [(2, 1), (2, 1), (1, 2), (1, 2), (1, 2), (2, 1), (2, 1), (1, 2)]
            .iter()
            .map(|&(a, b)| vec![Some(a), Some(b)])
            .collect(),
    })
    .expect("valid instance")
}

/// A generated instance with budgets in `[1, 100]` and 80% availability.
pub fn generated(products: usize, customers: usize, seed: u64) -> Instance {
    generate_instance(products, customers, 1, 100, 0.8, seed).expect("valid parameters")
}

pub fn random_batch(inst: &Instance, grid: &BudgetGrid, n: usize, seed: u64) -> Vec<PriceVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_price(grid, inst.num_products(), &mut rng)).collect()
}

fn bench_assign(c: &mut Criterion) {
    let mut group = c.benchmark_group("assign");
    for (products, customers) in [(5, 30), (25, 30), (50, 60)] {
        let inst = generated(products, customers, 1);
        let grid = build_grid(&inst);
        let batch = random_batch(&inst, &grid, 256, 2);
        group.throughput(Throughput::Elements(batch.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(format!("{customers}c_{products}p")), &batch, |b, batch| {
            b.iter(|| batch.iter().map(|p| assign(&inst, &grid, black_box(p)).revenue).sum::<u64>())
        });
    }
    group.finish();
}

fn bench_brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force");
    group.sample_size(10);
    let inst = toy();
    let grid = build_grid(&inst);
    group.bench_function("toy", |b| b.iter(|| brute_force(&inst, &grid, DEFAULT_ENUMERATION_CAP)));
    let inst = generated(3, 30, 3);
    let grid = build_grid(&inst);
    group.bench_function("30c_3p", |b| b.iter(|| brute_force(&inst, &grid, DEFAULT_ENUMERATION_CAP)));
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_search");
    let inst = generated(25, 30, 4);
    let grid = build_grid(&inst);
    let batch: Vec<_> = random_batch(&inst, &grid, 64, 5)
        .into_iter()
        .map(|p| {
            let a = assign(&inst, &grid, &p);
            (p, a)
        })
        .collect();
    for letters in ["s", "sfrc", "o"] {
        let pipeline: Pipeline = letters.parse().expect("valid letters");
        group.bench_function(letters, |b| {
            b.iter(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(6);
                run_pipeline(&inst, &grid, &pipeline, batch.clone(), &mut rng)
            })
        });
    }
    group.finish();
}

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    let inst = generated(25, 30, 7);
    let grid = build_grid(&inst);
    for method in [Method::Vns, Method::Genetic] {
        let params = SearchParams {
            stop: StopRule::MaxPoints(4_000),
            init: InitKind::Greedy,
            local_search: Pipeline::sfrc(),
            ..SearchParams::defaults_for(method)
        };
        group.bench_function(method.as_str(), |b| {
            b.iter(|| search(method, &inst, &grid, &params, &mut ChaCha8Rng::seed_from_u64(8)))
        });
    }
    group.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    bench_assign(c);
    bench_brute_force(c);
    bench_pipeline(c);
    bench_search(c);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_consistent() {
        let inst = toy();
        let grid = build_grid(&inst);
        assert_eq!(brute_force(&inst, &grid, 100).unwrap().optimum, 236);
        let g = generated(4, 10, 1);
        assert_eq!((g.num_products(), g.num_customers()), (4, 10));
        assert_eq!(random_batch(&g, &build_grid(&g), 3, 0).len(), 3);
    }
}
