//! Shared corpus and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrd::{Dyadic, IndexSet, StandardTuple};

pub const CORPUS_SEED: u64 = 0x5EED_2B0B;
pub const CORPUS_SIZE: usize = 500;

/// A small tuple kept in machine integers for the oracles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Small {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub s: u32,
}

impl Small {
    pub fn tuple(&self) -> StandardTuple {
        StandardTuple::from_u64(&self.a, &self.b, self.s).unwrap()
    }
}

/// `m ∈ [2,5]`, `s ∈ [2,6]`, `a_j ∈ [0,30]`, `b_j ∈ [1,30]`, distinct pairs.
pub fn random_small(rng: &mut ChaCha8Rng) -> Small {
    let m = rng.gen_range(2..=5);
    let s = rng.gen_range(2..=6);
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    while pairs.len() < m {
        let p = (rng.gen_range(0..=30), rng.gen_range(1..=30));
        if !pairs.contains(&p) {
            pairs.push(p);
        }
    }
    Small {
        a: pairs.iter().map(|p| p.0).collect(),
        b: pairs.iter().map(|p| p.1).collect(),
        s,
    }
}

pub fn corpus() -> Vec<Small> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE).map(|_| random_small(&mut rng)).collect()
}

pub const DENSE_SEED: u64 = 0xD3_45E;
pub const DENSE_SIZE: usize = 1500;

/// Small `b_j ∈ [1,12]` and `a_j ∈ [0,20]` make the sets `S_i` collide often,
/// so this corpus reaches every formula path.
pub fn dense_corpus() -> Vec<Small> {
    let mut rng = ChaCha8Rng::seed_from_u64(DENSE_SEED);
    (0..DENSE_SIZE)
        .map(|_| {
            let m = rng.gen_range(2..=6);
            let s = rng.gen_range(2..=5);
            let mut pairs: Vec<(u64, u64)> = Vec::new();
            while pairs.len() < m {
                let p = (rng.gen_range(0..=20), rng.gen_range(1..=12));
                if !pairs.contains(&p) {
                    pairs.push(p);
                }
            }
            Small {
                a: pairs.iter().map(|p| p.0).collect(),
                b: pairs.iter().map(|p| p.1).collect(),
                s,
            }
        })
        .collect()
}

/// Both corpora.
pub fn all_tuples() -> Vec<Small> {
    let mut out = corpus();
    out.extend(dense_corpus());
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Distinct `b` values in first-occurrence order.
pub fn distinct_b(t: &Small) -> Vec<u64> {
    let mut out = Vec::new();
    for &b in &t.b {
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

/// `𝒦_max` from integer arithmetic: every point `a/b_i + j` is scaled by the
/// lcm of the differences, so the sets `S_i` become sets of integers.
pub fn kmax_oracle(t: &Small) -> BTreeSet<Vec<usize>> {
    let bs = distinct_b(t);
    let l = bs.iter().fold(1u64, |acc, &b| acc / gcd(acc, b) * b);
    let mut s_sets: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); bs.len()];
    for (&a, &b) in t.a.iter().zip(&t.b) {
        let i = bs.iter().position(|&x| x == b).unwrap();
        for j in 0..t.s as u64 {
            s_sets[i].insert(a * (l / b) + j * l);
        }
    }
    let points: BTreeSet<u64> = s_sets.iter().flatten().copied().collect();
    points
        .iter()
        .map(|x| {
            (0..bs.len())
                .filter(|&i| s_sets[i].contains(x))
                .map(|i| i + 1)
                .collect()
        })
        .collect()
}

pub fn labels(f: &[IndexSet]) -> BTreeSet<Vec<usize>> {
    f.iter().map(|k| k.labels()).collect()
}

fn prime_factors_odd_multiplicity(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out.push(p);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Density of `Π₊` by counting sign patterns: the symbols `χ_p(q)` of the
/// distinct primes `q` dividing the differences are jointly uniform, and
/// `χ_p(b) = ∏ χ_p(q)` over the primes of odd multiplicity in `b`.
pub fn density_oracle(t: &Small) -> Dyadic {
    let bs = distinct_b(t);
    let supports: Vec<Vec<u64>> = bs
        .iter()
        .map(|&b| prime_factors_odd_multiplicity(b))
        .collect();
    let universe: Vec<u64> = supports
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let masks: Vec<u32> = supports
        .iter()
        .map(|s| {
            s.iter()
                .map(|q| 1u32 << universe.iter().position(|u| u == q).unwrap())
                .fold(0, |a, b| a | b)
        })
        .collect();
    let kmax = kmax_oracle(t);
    let n = universe.len();
    let good = (0u32..1 << n)
        .filter(|&neg| {
            let chi: Vec<u32> = masks.iter().map(|m| (m & neg).count_ones() % 2).collect();
            kmax.iter()
                .all(|k| k.iter().all(|&i| chi[i - 1] == chi[k[0] - 1]))
        })
        .count();
    Dyadic::new(good as i128, n as u32).unwrap()
}

/// Primes up to `n` by trial division.
pub fn primes_by_trial_division(n: u64) -> Vec<u64> {
    (2..=n)
        .filter(|&x| (2..).take_while(|d| d * d <= x).all(|d| x % d != 0))
        .collect()
}

/// Legendre symbol by listing the squares mod `p`.
pub fn legendre_by_squares(z: u64, p: u64) -> i8 {
    let z = z % p;
    if z == 0 {
        return 0;
    }
    if (1..p).any(|x| x * x % p == z) {
        1
    } else {
        -1
    }
}

/// Nonemptiness of the parity system by trying every `N ⊆ universe`.
pub fn parity_system_brute(odd: &[Vec<u64>], even: &[Vec<u64>]) -> bool {
    let universe: Vec<u64> = odd
        .iter()
        .chain(even)
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mask = |s: &Vec<u64>| {
        s.iter()
            .map(|q| 1u32 << universe.iter().position(|u| u == q).unwrap())
            .fold(0, |a, b| a | b)
    };
    let odd: Vec<u32> = odd.iter().map(mask).collect();
    let even: Vec<u32> = even.iter().map(mask).collect();
    (0u32..1 << universe.len()).any(|n| {
        odd.iter().all(|m| (m & n).count_ones() % 2 == 1)
            && even.iter().all(|m| (m & n).count_ones() % 2 == 0)
    })
}

/// Random disjoint families of nonempty subsets of the first `n` primes.
pub fn random_parity_instance(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let count = rng.gen_range(0..=6);
    let mut seen: BTreeMap<Vec<u64>, bool> = BTreeMap::new();
    for _ in 0..count {
        let bits: u32 = rng.gen_range(1..1u32 << n);
        let set: Vec<u64> = (0..n)
            .filter(|i| bits >> i & 1 == 1)
            .map(|i| PRIMES[i])
            .collect();
        let odd = rng.gen_bool(0.5);
        seen.entry(set).or_insert(odd);
    }
    let odd = seen
        .iter()
        .filter(|(_, &o)| o)
        .map(|(s, _)| s.clone())
        .collect();
    let even = seen
        .iter()
        .filter(|(_, &o)| !o)
        .map(|(s, _)| s.clone())
        .collect();
    (odd, even)
}
