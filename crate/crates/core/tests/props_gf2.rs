//! GF(2) rank and parity-system invariants against brute force.

mod common;

use common::{parity_system_brute, random_parity_instance};
use num_bigint::BigUint;
use proptest::prelude::*;
use qrd::gf2::{
    is_independent_by_symdiff, is_independent_set, rank, rank_of_prime_sets, solution_count,
    solution_count_brute_force, symdiff_criterion, vector_of, Gf2Vector, PrimeUniverse,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn prime_set(bits: u8) -> Vec<u64> {
    (0..8)
        .filter(|i| bits >> i & 1 == 1)
        .map(|i| PRIMES[i])
        .collect()
}

fn vectors(masks: &[u8]) -> Vec<Gf2Vector> {
    let u = PrimeUniverse::new(PRIMES).unwrap();
    masks
        .iter()
        .map(|&m| vector_of(&prime_set(m), &u).unwrap())
        .collect()
}

/// Rank as the base-2 log of the size of the span.
fn span_rank(masks: &[u8]) -> usize {
    let mut span = std::collections::BTreeSet::from([0u8]);
    for &m in masks {
        let shifted: Vec<u8> = span.iter().map(|x| x ^ m).collect();
        span.extend(shifted);
    }
    span.len().trailing_zeros() as usize
}

#[test]
fn symdiff_criterion_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0_0F);
    for n in 1..=8 {
        for _ in 0..100 {
            let (odd, even) = random_parity_instance(&mut rng, n);
            assert_eq!(
                symdiff_criterion(&odd, &even).unwrap(),
                parity_system_brute(&odd, &even),
                "odd {odd:?} even {even:?}"
            );
        }
    }
}

#[test]
fn solution_count_is_zero_or_power_of_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0_07);
    for n in 1..=8 {
        for _ in 0..60 {
            let (odd, even) = random_parity_instance(&mut rng, n);
            let u = PrimeUniverse::new(PRIMES[..n].iter().copied()).unwrap();
            let count = solution_count(&odd, &even, &u).unwrap();
            let brute = solution_count_brute_force(&odd, &even, &u).unwrap();
            assert_eq!(count, brute);
            let all: Vec<Vec<u64>> = odd.iter().chain(&even).cloned().collect();
            let d = rank_of_prime_sets(&all).unwrap();
            let full = BigUint::from(1u32) << (n - d);
            assert!(
                count == BigUint::from(0u32) || count == full,
                "{odd:?} {even:?}"
            );
        }
    }
}

proptest! {
    #[test]
    fn rank_matches_span_size(masks in prop::collection::vec(any::<u8>(), 0..10)) {
        prop_assert_eq!(rank(&vectors(&masks)).unwrap(), span_rank(&masks));
    }

    #[test]
    fn rank_is_permutation_invariant(
        masks in prop::collection::vec(any::<u8>(), 1..10),
        rotate in 0usize..10,
    ) {
        let mut shuffled = masks.clone();
        shuffled.rotate_left(rotate % masks.len());
        shuffled.reverse();
        prop_assert_eq!(rank(&vectors(&masks)).unwrap(), rank(&vectors(&shuffled)).unwrap());
    }

    #[test]
    fn rank_ignores_vectors_in_the_span(
        masks in prop::collection::vec(any::<u8>(), 1..10),
        pick in any::<u16>(),
    ) {
        let extra = masks
            .iter()
            .enumerate()
            .filter(|(i, _)| pick >> (i % 16) & 1 == 1)
            .fold(0u8, |acc, (_, &m)| acc ^ m);
        let mut more = masks.clone();
        more.push(extra);
        prop_assert_eq!(rank(&vectors(&masks)).unwrap(), rank(&vectors(&more)).unwrap());
    }

    #[test]
    fn independence_two_ways(masks in prop::collection::vec(1u8.., 0..8)) {
        let v = vectors(&masks);
        let by_rank = is_independent_set(&v).unwrap();
        prop_assert_eq!(by_rank, is_independent_by_symdiff(&v).unwrap());
        let distinct = masks.iter().collect::<std::collections::BTreeSet<_>>().len() == masks.len();
        prop_assert_eq!(by_rank, distinct && span_rank(&masks) == masks.len());
    }
}
