// SPDX-License-Identifier: Apache-2.0

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{validate_instance, Instance, RawInstance};

#[derive(Debug, Error, PartialEq)]
pub enum InvalidRange {
    #[error("budget range [{lo}, {hi}] must satisfy 1 <= lo <= hi")]
    Budget { lo: u64, hi: u64 },
    #[error("availability probability {0} must lie in (0, 1]")]
    Availability(f64),
    #[error("need at least one product and one customer")]
    Empty,
}

/// Random instance with uniform budgets on `[lo, hi]`. Each product is
/// available to a customer with probability `avail`; rows that come out
/// empty are redrawn. Available products are ranked by a random permutation.
pub fn generate_instance(
    num_products: usize,
    num_customers: usize,
    lo: u64,
    hi: u64,
    avail: f64,
    seed: u64,
) -> Result<Instance, InvalidRange> {
    if lo == 0 || lo > hi || hi > i64::MAX as u64 {
        return Err(InvalidRange::Budget { lo, hi });
    }
    if !(avail > 0.0 && avail <= 1.0) {
        return Err(InvalidRange::Availability(avail));
    }
    if num_products == 0 || num_customers == 0 {
        return Err(InvalidRange::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budgets: Vec<i64> = (0..num_customers).map(|_| rng.random_range(lo..=hi) as i64).collect();
    let preferences = (0..num_customers)
        .map(|_| {
            let available: Vec<usize> = loop {
                let row: Vec<usize> = (0..num_products).filter(|_| rng.random_bool(avail)).collect();
                if !row.is_empty() {
                    break row;
                }
            };
            let mut scores: Vec<i64> = (1..=available.len() as i64).collect();
            scores.shuffle(&mut rng);
            let mut row = vec![None; num_products];
            for (&i, s) in available.iter().zip(scores) {
                row[i] = Some(s);
            }
            row
        })
        .collect();
    let raw = RawInstance {
        name: format!("gen-{num_customers}c-{num_products}p-{seed}"),
        num_products,
        num_customers,
        budgets,
        preferences,
    };
    Ok(validate_instance(raw).expect("generated instances are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_grid;

    #[test]
    fn bounds_respected() {
        let inst = generate_instance(2, 8, 18, 66, 1.0, 5).unwrap();
        assert!(inst.budgets().iter().all(|&b| (18..=66).contains(&b)));
        assert!(build_grid(&inst).len() <= 8);
        for k in 0..8 {
            assert!(inst.preference_row(k).iter().all(Option::is_some));
        }
    }

    #[test]
    fn deterministic_bytes() {
        let a = generate_instance(5, 30, 1, 100, 0.6, 42).unwrap().to_json();
        let b = generate_instance(5, 30, 1, 100, 0.6, 42).unwrap().to_json();
        let c = generate_instance(5, 30, 1, 100, 0.6, 43).unwrap().to_json();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sparse_rows_are_redrawn() {
        let inst = generate_instance(3, 200, 1, 10, 0.05, 9).unwrap();
        for k in 0..200 {
            let row = inst.preference_row(k);
            let mut scores: Vec<u64> = row.iter().flatten().copied().collect();
            assert!(!scores.is_empty());
            scores.sort_unstable();
            assert_eq!(scores, (1..=scores.len() as u64).collect::<Vec<_>>());
        }
    }

    #[test]
    fn invalid_ranges() {
        assert_eq!(generate_instance(1, 1, 0, 5, 1.0, 0).unwrap_err(), InvalidRange::Budget { lo: 0, hi: 5 });
        assert_eq!(generate_instance(1, 1, 6, 5, 1.0, 0).unwrap_err(), InvalidRange::Budget { lo: 6, hi: 5 });
        assert_eq!(generate_instance(1, 1, 1, 5, 0.0, 0).unwrap_err(), InvalidRange::Availability(0.0));
        assert_eq!(generate_instance(0, 1, 1, 5, 1.0, 0).unwrap_err(), InvalidRange::Empty);
    }
}
