//! Linear algebra over the two-element field on vectors indexed by a finite,
//! ascending set of primes, and the symmetric-difference test for parity
//! systems `|N ∩ S|` odd / `|N ∩ T|` even.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{check_limit, Error, Result};

/// Largest family handled by [`symdiff_criterion`]; the test enumerates
/// every subset of the family.
pub const MAX_SYMDIFF_FAMILY: usize = 20;

/// Universes up to this size are counted by brute force in
/// [`solution_count`].
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// A set of primes in ascending order; position `i` is coordinate `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeUniverse {
    elements: Vec<u64>,
}

impl PrimeUniverse {
    /// Sorts and deduplicates; every element must be prime.
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Arc<Self>> {
        let elements: Vec<u64> = primes
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for &p in &elements {
            if !arith::is_prime(p)? {
                return Err(Error::Domain(format!("universe element {p} is not prime")));
            }
        }
        Ok(Arc::new(PrimeUniverse { elements }))
    }

    /// Union of the given prime sets.
    pub fn spanning<'a>(sets: impl IntoIterator<Item = &'a [u64]>) -> Result<Arc<Self>> {
        Self::new(sets.into_iter().flatten().copied())
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, p: u64) -> Option<usize> {
        self.elements.binary_search(&p).ok()
    }

    fn words(&self) -> usize {
        self.elements.len().div_ceil(64).max(1)
    }
}

/// `v(S)`: the indicator vector of a prime set inside a universe.
#[derive(Debug, Clone)]
pub struct Gf2Vector {
    universe: Arc<PrimeUniverse>,
    words: Vec<u64>,
}

impl PartialEq for Gf2Vector {
    fn eq(&self, other: &Self) -> bool {
        same_universe(&self.universe, &other.universe) && self.words == other.words
    }
}

impl Eq for Gf2Vector {}

fn same_universe(a: &Arc<PrimeUniverse>, b: &Arc<PrimeUniverse>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Gf2Vector {
    pub fn zero(universe: &Arc<PrimeUniverse>) -> Self {
        Gf2Vector {
            universe: Arc::clone(universe),
            words: vec![0; universe.words()],
        }
    }

    pub fn universe(&self) -> &Arc<PrimeUniverse> {
        &self.universe
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// `supp(v)` as universe positions.
    pub fn support(&self) -> Vec<usize> {
        (0..self.universe.len()).filter(|&i| self.get(i)).collect()
    }

    /// The primes at the support positions.
    pub fn primes(&self) -> Vec<u64> {
        self.support()
            .into_iter()
            .map(|i| self.universe.elements[i])
            .collect()
    }

    pub fn add_assign(&mut self, other: &Gf2Vector) -> Result<()> {
        if !same_universe(&self.universe, &other.universe) {
            return Err(Error::Domain(
                "vectors belong to different universes".into(),
            ));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }
}

/// Indicator vector of `primeset`; every prime must belong to the universe.
pub fn vector_of(primeset: &[u64], universe: &Arc<PrimeUniverse>) -> Result<Gf2Vector> {
    let mut v = Gf2Vector::zero(universe);
    for &p in primeset {
        let i = universe
            .position(p)
            .ok_or_else(|| Error::Domain(format!("prime {p} is outside the universe")))?;
        v.words[i / 64] |= 1 << (i % 64);
    }
    Ok(v)
}

/// Gaussian elimination on raw bit rows.
pub(crate) fn rank_of_rows(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, Vec::len) * 64;
    for col in 0..width {
        let (w, b) = (col / 64, col % 64);
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] >> b & 1 == 1 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Dimension of the span over the two-element field.
pub fn rank(vectors: &[Gf2Vector]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    if vectors
        .iter()
        .any(|v| !same_universe(&v.universe, &first.universe))
    {
        return Err(Error::Domain(
            "vectors belong to different universes".into(),
        ));
    }
    Ok(rank_of_rows(
        vectors.iter().map(|v| v.words.clone()).collect(),
    ))
}

/// Rank of `{v(S)}` for a list of prime sets, over the universe they span.
pub fn rank_of_prime_sets(sets: &[Vec<u64>]) -> Result<usize> {
    let universe = PrimeUniverse::spanning(sets.iter().map(Vec::as_slice))?;
    let vectors = sets
        .iter()
        .map(|s| vector_of(s, &universe))
        .collect::<Result<Vec<_>>>()?;
    rank(&vectors)
}

/// True iff the vectors are linearly independent; a zero vector or a repeat
/// makes the answer false.
pub fn is_independent_set(vectors: &[Gf2Vector]) -> Result<bool> {
    if vectors.iter().any(Gf2Vector::is_zero) {
        return Ok(false);
    }
    Ok(rank(vectors)? == vectors.len())
}

/// Independence via the symmetric-difference formulation: every nonempty
/// subset has a nonempty repeated symmetric difference of supports.
pub fn is_independent_by_symdiff(vectors: &[Gf2Vector]) -> Result<bool> {
    check_limit("vector family", vectors.len(), MAX_SYMDIFF_FAMILY)?;
    let rows: Vec<&[u64]> = vectors.iter().map(|v| v.words.as_slice()).collect();
    let width = rows.first().map_or(0, |r| r.len());
    let mut acc = vec![0u64; width];
    let mut found_empty = false;
    gray_walk(rows.len(), |flip, _| {
        for (a, b) in acc.iter_mut().zip(rows[flip]) {
            *a ^= b;
        }
        if acc.iter().all(|&w| w == 0) {
            found_empty = true;
            return false;
        }
        true
    });
    Ok(!found_empty)
}

/// Visits every nonempty subset of `0..n` in Gray-code order. `step(i, size)`
/// receives the element toggled and the new subset size; returning false
/// stops the walk.
fn gray_walk(n: usize, mut step: impl FnMut(usize, usize) -> bool) {
    let mut size = 0usize;
    let mut present = vec![false; n];
    for g in 1u64..(1u64 << n) {
        let i = g.trailing_zeros() as usize;
        present[i] = !present[i];
        if present[i] {
            size += 1;
        } else {
            size -= 1;
        }
        if !step(i, size) {
            return;
        }
    }
}

/// One element of a parity family: a prime set and whether it
/// sits on the even side (`T ∪ {∅}`).
#[derive(Debug, Clone)]
pub(crate) struct ParityItem {
    pub words: Vec<u64>,
    pub even_side: bool,
}

/// Returns true iff no odd-cardinality subset `U` of the items has an even
/// number of even-side members and an empty repeated symmetric difference.
pub(crate) fn no_odd_empty_symdiff(items: &[ParityItem]) -> Result<bool> {
    check_limit("parity family", items.len(), MAX_SYMDIFF_FAMILY + 1)?;
    let width = items.first().map_or(0, |it| it.words.len());
    let mut acc = vec![0u64; width];
    let mut even_count = 0usize;
    let mut present = vec![false; items.len()];
    let mut ok = true;
    gray_walk(items.len(), |i, size| {
        present[i] = !present[i];
        if items[i].even_side {
            if present[i] {
                even_count += 1;
            } else {
                even_count -= 1;
            }
        }
        for (a, b) in acc.iter_mut().zip(&items[i].words) {
            *a ^= b;
        }
        if size % 2 == 1 && even_count.is_multiple_of(2) && acc.iter().all(|&w| w == 0) {
            ok = false;
            return false;
        }
        true
    });
    Ok(ok)
}

fn normalize_family(family: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
    family
        .iter()
        .map(|s| {
            s.iter()
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect()
}

/// Decides whether some `N` has odd intersection with every set of
/// `odd_family` and even intersection with every set of `even_family`, by the
/// odd-subset symmetric-difference test.
pub fn symdiff_criterion(odd_family: &[Vec<u64>], even_family: &[Vec<u64>]) -> Result<bool> {
    let odd = normalize_family(odd_family);
    let even = normalize_family(even_family);
    if odd.contains(&Vec::new()) {
        return Err(Error::Domain(
            "the empty set cannot be required to have odd intersection".into(),
        ));
    }
    if let Some(shared) = odd.intersection(&even).next() {
        return Err(Error::Domain(format!(
            "families are not disjoint: {shared:?} appears in both"
        )));
    }
    check_limit("parity family", odd.len() + even.len(), MAX_SYMDIFF_FAMILY)?;
    let universe = PrimeUniverse::spanning(odd.iter().chain(&even).map(Vec::as_slice))?;
    let mut items = Vec::with_capacity(odd.len() + even.len() + 1);
    for s in &odd {
        items.push(ParityItem {
            words: vector_of(s, &universe)?.words,
            even_side: false,
        });
    }
    let mut even_with_empty = even.clone();
    even_with_empty.insert(Vec::new());
    for s in &even_with_empty {
        items.push(ParityItem {
            words: vector_of(s, &universe)?.words,
            even_side: true,
        });
    }
    no_odd_empty_symdiff(&items)
}

fn check_in_universe(family: &[Vec<u64>], universe: &PrimeUniverse) -> Result<()> {
    for s in family {
        for &p in s {
            if universe.position(p).is_none() {
                return Err(Error::Domain(format!("prime {p} is outside the universe")));
            }
        }
    }
    Ok(())
}

/// Number of `N ⊆ universe` satisfying the parity system: brute force for
/// small universes, otherwise the zero-or-`2^(n-d)` dichotomy.
pub fn solution_count(
    odd_family: &[Vec<u64>],
    even_family: &[Vec<u64>],
    universe: &Arc<PrimeUniverse>,
) -> Result<BigUint> {
    check_in_universe(odd_family, universe)?;
    check_in_universe(even_family, universe)?;
    if universe.len() <= BRUTE_FORCE_LIMIT {
        solution_count_brute_force(odd_family, even_family, universe)
    } else {
        solution_count_by_rank(odd_family, even_family, universe)
    }
}

pub fn solution_count_brute_force(
    odd_family: &[Vec<u64>],
    even_family: &[Vec<u64>],
    universe: &Arc<PrimeUniverse>,
) -> Result<BigUint> {
    check_limit("brute-force universe", universe.len(), BRUTE_FORCE_LIMIT)?;
    let mask = |s: &Vec<u64>| -> Result<u32> { Ok(vector_of(s, universe)?.words[0] as u32) };
    let odd: Vec<u32> = odd_family.iter().map(mask).collect::<Result<_>>()?;
    let even: Vec<u32> = even_family.iter().map(mask).collect::<Result<_>>()?;
    let count = (0u32..(1u32 << universe.len()))
        .filter(|&n| {
            odd.iter().all(|&s| (n & s).count_ones() % 2 == 1)
                && even.iter().all(|&t| (n & t).count_ones() % 2 == 0)
        })
        .count();
    Ok(BigUint::from(count))
}

/// `0` or `2^(n-d)`, with [`symdiff_criterion`] choosing between them.
pub fn solution_count_by_rank(
    odd_family: &[Vec<u64>],
    even_family: &[Vec<u64>],
    universe: &Arc<PrimeUniverse>,
) -> Result<BigUint> {
    let odd = normalize_family(odd_family);
    let even = normalize_family(even_family);
    if odd.contains(&Vec::new()) || odd.intersection(&even).next().is_some() {
        return Ok(BigUint::zero());
    }
    let vectors = odd
        .iter()
        .chain(&even)
        .filter(|s| !s.is_empty())
        .map(|s| vector_of(s, universe))
        .collect::<Result<Vec<_>>>()?;
    let d = rank(&vectors)?;
    let odd_v: Vec<Vec<u64>> = odd.into_iter().collect();
    let even_v: Vec<Vec<u64>> = even.into_iter().collect();
    if symdiff_criterion(&odd_v, &even_v)? {
        Ok(BigUint::one() << (universe.len() - d))
    } else {
        Ok(BigUint::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe(ps: &[u64]) -> Arc<PrimeUniverse> {
        PrimeUniverse::new(ps.iter().copied()).unwrap()
    }

    #[test]
    fn vector_of_examples() {
        let u = universe(&[2, 3, 5]);
        assert!(vector_of(&[], &u).unwrap().is_zero());
        assert_eq!(vector_of(&[2, 3], &u).unwrap().support(), vec![0, 1]);
        assert_eq!(vector_of(&[5], &u).unwrap().support(), vec![2]);
        assert!(matches!(vector_of(&[7], &u), Err(Error::Domain(_))));
    }

    #[test]
    fn universe_rejects_composites() {
        assert!(PrimeUniverse::new([2, 4]).is_err());
        assert_eq!(universe(&[5, 2, 3, 2]).elements(), &[2, 3, 5]);
    }

    #[test]
    fn rank_examples() {
        let u = universe(&[2, 3]);
        let v2 = vector_of(&[2], &u).unwrap();
        let v3 = vector_of(&[3], &u).unwrap();
        let v23 = vector_of(&[2, 3], &u).unwrap();
        assert_eq!(rank(&[]).unwrap(), 0);
        assert_eq!(rank(&[Gf2Vector::zero(&u)]).unwrap(), 0);
        assert_eq!(rank(&[v2.clone(), v23.clone()]).unwrap(), 2);
        assert_eq!(rank(&[v2.clone(), v3.clone(), v23.clone()]).unwrap(), 2);
        let other = universe(&[2, 3, 5]);
        let w = vector_of(&[5], &other).unwrap();
        assert!(matches!(rank(&[v2.clone(), w]), Err(Error::Domain(_))));
    }

    #[test]
    fn independence_examples() {
        let u = universe(&[2, 3]);
        let v2 = vector_of(&[2], &u).unwrap();
        let v3 = vector_of(&[3], &u).unwrap();
        let v23 = vector_of(&[2, 3], &u).unwrap();
        assert!(is_independent_set(&[v2.clone(), v23.clone()]).unwrap());
        assert!(!is_independent_set(&[v2.clone(), v3.clone(), v23.clone()]).unwrap());
        assert!(is_independent_set(std::slice::from_ref(&v2)).unwrap());
        assert!(!is_independent_set(&[Gf2Vector::zero(&u)]).unwrap());
        assert!(is_independent_by_symdiff(&[v2.clone(), v23.clone()]).unwrap());
        assert!(!is_independent_by_symdiff(&[v2, v3, v23]).unwrap());
    }

    #[test]
    fn symdiff_examples() {
        assert!(symdiff_criterion(&[vec![2]], &[]).unwrap());
        assert!(!symdiff_criterion(&[vec![2], vec![3], vec![2, 3]], &[]).unwrap());
        assert!(symdiff_criterion(&[], &[vec![2], vec![3, 5]]).unwrap());
        assert!(matches!(
            symdiff_criterion(&[vec![]], &[]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            symdiff_criterion(&[vec![2]], &[vec![2]]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn symdiff_family_cap() {
        let primes: Vec<u64> = crate::arith::sieve_primes(100).unwrap().primes()[..21].to_vec();
        let family: Vec<Vec<u64>> = primes.iter().map(|&p| vec![p]).collect();
        assert!(matches!(
            symdiff_criterion(&family, &[]),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn solution_count_examples() {
        let u2 = universe(&[2]);
        assert_eq!(
            solution_count(&[vec![2]], &[], &u2).unwrap(),
            BigUint::from(1u32)
        );
        let u23 = universe(&[2, 3]);
        assert_eq!(solution_count(&[], &[], &u23).unwrap(), BigUint::from(4u32));
        assert_eq!(
            solution_count(&[vec![2], vec![3], vec![2, 3]], &[], &u23).unwrap(),
            BigUint::zero()
        );
        assert_eq!(
            solution_count_by_rank(&[vec![2]], &[vec![3]], &u23).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn large_universe_uses_rank_path() {
        let primes: Vec<u64> = crate::arith::sieve_primes(200).unwrap().primes()[..30].to_vec();
        let u = PrimeUniverse::new(primes.iter().copied()).unwrap();
        let count = solution_count(&[vec![primes[0], primes[1]]], &[vec![primes[2]]], &u).unwrap();
        assert_eq!(count, BigUint::one() << 28);
    }
}
