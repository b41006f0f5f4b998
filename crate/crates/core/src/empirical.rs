//! Brute-force verification over primes: membership in `Π₊`, empirical
//! densities, `q_ε(p)` counts and character-density oracles.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, legendre_residue, reduce_mod_unsigned, MemoryBudget, ResidueTable};
use crate::density::{analyze, Dyadic};
use crate::error::{Error, Result};
use crate::tuples::{
    build_structure, kmax_direct, KMaxFamily, Rational, StandardTuple, TupleStructure,
};

/// Smallest sieve bound accepted by the empirical estimators.
pub const MIN_BOUND: u64 = 100;
/// Largest `|K|` for the even-subset cross-check.
pub const MAX_EVEN_SUBSET_K: usize = 16;
const CHUNK: usize = 4096;

fn require_odd(p: u64) -> Result<()> {
    if p.is_multiple_of(2) || p < 3 {
        Err(Error::Domain(format!("expected an odd prime, got {p}")))
    } else {
        Ok(())
    }
}

fn require_bound(bound: u64) -> Result<()> {
    if bound < MIN_BOUND {
        Err(Error::Domain(format!(
            "prime bound must be at least {MIN_BOUND}, got {bound}"
        )))
    } else {
        Ok(())
    }
}

/// `p` divides no element of `B`.
pub fn is_allowable(p: u64, st: &TupleStructure) -> Result<bool> {
    require_odd(p)?;
    Ok(st.b_values().iter().all(|b| reduce_mod_unsigned(b, p) != 0))
}

fn symbols(p: u64, st: &TupleStructure) -> Vec<i8> {
    st.b_values()
        .iter()
        .map(|b| legendre_residue(reduce_mod_unsigned(b, p), p))
        .collect()
}

fn constant_on_each(kmax: &KMaxFamily, chi: &[i8]) -> bool {
    kmax.members().iter().all(|k| {
        let mut it = k.iter().map(|i| chi[i]);
        let first = it.next();
        it.all(|c| Some(c) == first)
    })
}

/// `χ_p(b_i)` is constant on every `K ∈ 𝒦_max`.
pub fn in_pi_plus(p: u64, kmax: &KMaxFamily, st: &TupleStructure) -> Result<bool> {
    if !is_allowable(p, st)? {
        return Err(Error::Domain(format!("{p} divides an element of B")));
    }
    Ok(constant_on_each(kmax, &symbols(p, st)))
}

/// `χ_p(∏_{i∈I} b_i) = 1` for every even `I ⊆ K`, `K ∈ 𝒦_max`, evaluated on
/// the products themselves.
pub fn in_pi_plus_by_even_subsets(p: u64, kmax: &KMaxFamily, st: &TupleStructure) -> Result<bool> {
    if !is_allowable(p, st)? {
        return Err(Error::Domain(format!("{p} divides an element of B")));
    }
    for k in kmax.members() {
        crate::error::check_limit("|K| for the even-subset check", k.len(), MAX_EVEN_SUBSET_K)?;
        for sub in k.subsets() {
            if sub.len() < 2 || sub.len() % 2 == 1 {
                continue;
            }
            let product: BigUint = sub.iter().map(|i| &st.b_values()[i]).product();
            if legendre_residue(reduce_mod_unsigned(&product, p), p) != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One row of the per-prime dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRow {
    pub p: u64,
    pub allowable: bool,
    pub in_pi_plus: bool,
}

impl PrimeRow {
    pub const CSV_HEADER: &'static str = "p,allowable,in_pi_plus";

    pub fn to_csv(&self) -> String {
        format!("{},{},{}", self.p, self.allowable, self.in_pi_plus)
    }
}

/// Classifies every odd prime `≤ bound`, in ascending order.
pub fn prime_rows(t: &StandardTuple, bound: u64) -> Result<Vec<PrimeRow>> {
    let st = build_structure(t)?;
    let kmax = kmax_direct(&st);
    let table = arith::sieve_primes(bound.max(2))?;
    Ok(table
        .odd_primes()
        .par_chunks(CHUNK)
        .flat_map_iter(|chunk| {
            chunk.iter().map(|&p| {
                let chi = symbols(p, &st);
                let allowable = chi.iter().all(|&c| c != 0);
                PrimeRow {
                    p,
                    allowable,
                    in_pi_plus: allowable && constant_on_each(&kmax, &chi),
                }
            })
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub prime_bound: u64,
    /// Odd primes `≤ prime_bound`.
    pub primes_considered: u64,
    pub allowable_count: u64,
    pub pi_plus_count: u64,
    /// `pi_plus_count / allowable_count`.
    pub estimated_density: Rational,
    pub theoretical_density: Dyadic,
    pub absolute_error: Rational,
}

impl EmpiricalReport {
    pub fn error_f64(&self) -> f64 {
        self.absolute_error.to_f64()
    }
}

/// Counts allowable primes and members of `Π₊` among odd primes `≤ bound`;
/// the count is independent of the chunking.
pub fn empirical_density(t: &StandardTuple, bound: u64) -> Result<EmpiricalReport> {
    require_bound(bound)?;
    let theoretical = analyze(t)?.density_plus;
    let st = build_structure(t)?;
    let kmax = kmax_direct(&st);
    let table = arith::sieve_primes(bound)?;
    let odd = table.odd_primes();
    let (allowable, plus) = odd
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk.iter().fold((0u64, 0u64), |(a, q), &p| {
                let chi = symbols(p, &st);
                if chi.contains(&0) {
                    (a, q)
                } else {
                    (a + 1, q + u64::from(constant_on_each(&kmax, &chi)))
                }
            })
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    if allowable == 0 {
        return Err(Error::Domain(format!("no allowable primes up to {bound}")));
    }
    let estimated = Rational::new(BigInt::from(plus), BigInt::from(allowable))?;
    let error = estimated.sub(&theoretical.to_rational()).abs();
    Ok(EmpiricalReport {
        prime_bound: bound,
        primes_considered: odd.len() as u64,
        allowable_count: allowable,
        pi_plus_count: plus,
        estimated_density: estimated,
        theoretical_density: theoretical,
        absolute_error: error,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QCountReport {
    pub p: u64,
    pub epsilon: i8,
    pub q_count: u64,
    /// `p / (b · 2^κ)`.
    pub predicted: Rational,
    /// `q_count / predicted`.
    pub ratio: Rational,
    pub allowable: bool,
    /// `None` when `p` is not allowable.
    pub in_pi_plus: Option<bool>,
    pub kappa: usize,
    #[serde(with = "crate::bigjson::one")]
    pub b_max: BigUint,
}

/// Number of `n ≥ 1` such that every `a_j + b_j(n + i)`, `i ∈ [0, s−1]`, lies
/// in `[1, p−1]` and has Legendre symbol `ε`.
pub fn q_epsilon_count(p: u64, t: &StandardTuple, epsilon: i8) -> Result<QCountReport> {
    q_epsilon_count_with(p, t, epsilon, MemoryBudget::from_env()?)
}

pub fn q_epsilon_count_with(
    p: u64,
    t: &StandardTuple,
    epsilon: i8,
    budget: MemoryBudget,
) -> Result<QCountReport> {
    if epsilon != 1 && epsilon != -1 {
        return Err(Error::Domain(format!(
            "epsilon must be +1 or -1, got {epsilon}"
        )));
    }
    require_odd(p)?;
    let table = ResidueTable::new(p, budget)?;
    let st = build_structure(t)?;
    let s = t.s() as u64;
    let pairs: Option<Vec<(u64, u64)>> = t
        .a()
        .iter()
        .zip(t.b())
        .map(|(a, b)| Some((a.to_u64()?, b.to_u64()?)))
        .collect();
    let mut count = 0u64;
    if let Some(pairs) = pairs {
        // Largest n with a_j + b_j (n + s − 1) ≤ p − 1 for every j.
        let n_max = pairs
            .iter()
            .map(|&(a, b)| {
                let room = (p - 1).checked_sub(a)? / b;
                room.checked_sub(s - 1)
            })
            .min()
            .flatten();
        if let Some(n_max) = n_max {
            for n in 1..=n_max {
                let ok = pairs
                    .iter()
                    .all(|&(a, b)| (0..s).all(|i| table.symbol(a + b * (n + i)) == epsilon));
                count += u64::from(ok);
            }
        }
    }
    let b_max = st.b_max().clone();
    let kappa = st.kappa();
    let denom = BigInt::from(b_max.clone()) << kappa;
    let predicted = Rational::new(BigInt::from(p), denom)?;
    let ratio = Rational::from_integer(count).div(&predicted)?;
    let allowable = is_allowable(p, &st)?;
    let in_plus = if allowable {
        Some(in_pi_plus(p, &kmax_direct(&st), &st)?)
    } else {
        None
    };
    Ok(QCountReport {
        p,
        epsilon,
        q_count: count,
        predicted,
        ratio,
        allowable,
        in_pi_plus: in_plus,
        kappa,
        b_max,
    })
}

/// Frequency of `χ_p(z) = sign` for every constraint, over odd primes
/// `≤ bound` that divide no `z`.
pub fn character_density_oracle(constraints: &[(u64, i8)], bound: u64) -> Result<Rational> {
    require_bound(bound)?;
    for &(z, sign) in constraints {
        if z == 0 || arith::squarefree_part_u64(z)? != z {
            return Err(Error::Domain(format!(
                "{z} is not a square-free positive integer"
            )));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Domain(format!(
                "required sign must be +1 or -1, got {sign}"
            )));
        }
    }
    let table = arith::sieve_primes(bound)?;
    let (total, hits) = table
        .odd_primes()
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk.iter().fold((0u64, 0u64), |(n, h), &p| {
                let chi: Vec<i8> = constraints
                    .iter()
                    .map(|&(z, _)| legendre_residue(z % p, p))
                    .collect();
                if chi.contains(&0) {
                    return (n, h);
                }
                let ok = chi.iter().zip(constraints).all(|(&c, &(_, s))| c == s);
                (n + 1, h + u64::from(ok))
            })
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Rational::new(BigInt::from(hits), BigInt::from(total.max(1)))
}
