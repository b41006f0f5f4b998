//! Integer primitives: prime sieve, trial-division factorization, square-free
//! parts and Legendre symbols.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Primes up to this bound are cached for trial division.
pub const FACTOR_TABLE_BOUND: u64 = 1 << 20;

/// All primes `<= bound`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    bound: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Odd primes only.
    pub fn odd_primes(&self) -> &[u64] {
        match self.primes.first() {
            Some(2) => &self.primes[1..],
            _ => &self.primes,
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }
}

/// Sieve of Eratosthenes over odd numbers, one bit per odd candidate.
pub fn sieve_primes(bound: u64) -> Result<PrimeTable> {
    if bound < 2 {
        return Err(Error::Domain(format!(
            "sieve bound must be at least 2, got {bound}"
        )));
    }
    let bound_usize = usize::try_from(bound)
        .map_err(|_| Error::Resource(format!("sieve bound {bound} does not fit in memory")))?;
    // bit j stands for 2j+1
    let odd_count = bound_usize.div_ceil(2);
    let mut composite = vec![0u64; odd_count.div_ceil(64)];
    let mut j = 1;
    loop {
        let p = 2 * j + 1;
        if p * p > bound_usize {
            break;
        }
        if composite[j / 64] >> (j % 64) & 1 == 0 {
            let mut m = p * p / 2;
            while m < odd_count {
                composite[m / 64] |= 1 << (m % 64);
                m += p;
            }
        }
        j += 1;
    }
    let mut primes = Vec::with_capacity(estimate_prime_count(bound));
    primes.push(2);
    for j in 1..odd_count {
        if composite[j / 64] >> (j % 64) & 1 == 0 {
            primes.push(2 * j as u64 + 1);
        }
    }
    Ok(PrimeTable { bound, primes })
}

fn estimate_prime_count(bound: u64) -> usize {
    let x = bound as f64;
    (1.3 * x / x.ln().max(1.0)) as usize + 16
}

fn factor_table() -> &'static PrimeTable {
    static TABLE: OnceLock<PrimeTable> = OnceLock::new();
    TABLE.get_or_init(|| sieve_primes(FACTOR_TABLE_BOUND).expect("bound >= 2"))
}

/// Primality by trial division against the cached table. Valid for
/// `n < FACTOR_TABLE_BOUND^2`.
pub fn is_prime(n: u64) -> Result<bool> {
    if n < 2 {
        return Ok(false);
    }
    if n <= FACTOR_TABLE_BOUND {
        return Ok(factor_table().contains(n));
    }
    if n / FACTOR_TABLE_BOUND >= FACTOR_TABLE_BOUND {
        return Err(Error::Resource(format!(
            "{n} is too large for trial-division primality"
        )));
    }
    for &p in factor_table().primes() {
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Prime-power decomposition, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e))
    }

    /// Primes of odd multiplicity.
    pub fn odd_support(&self) -> Vec<u64> {
        self.factors
            .iter()
            .filter(|&&(_, e)| e % 2 == 1)
            .map(|&(p, _)| p)
            .collect()
    }

    pub fn squarefree_part(&self) -> BigUint {
        self.odd_support()
            .into_iter()
            .fold(BigUint::one(), |acc, p| acc * p)
    }
}

/// Trial division by the cached prime table.
///
/// A cofactor left after dividing out every tabled prime is accepted when it
/// is provably prime (below the square of the table bound) or the square of
/// such a prime; anything else is reported as unfactorable.
pub fn factorize(n: &BigUint) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut rest = n.clone();
    let mut factors = Vec::new();
    for &p in factor_table().primes() {
        if rest.is_one() {
            break;
        }
        if let Some(small) = rest.to_u64() {
            if p.saturating_mul(p) > small {
                break;
            }
        }
        let big_p = BigUint::from(p);
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&big_p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    }
    if !rest.is_one() {
        let limit = BigUint::from(FACTOR_TABLE_BOUND) * FACTOR_TABLE_BOUND;
        if rest < limit {
            let q = rest.to_u64().expect("below 2^40");
            factors.push((q, 1));
        } else {
            let root = rest.sqrt();
            if &root * &root == rest && root < limit {
                let q = root.to_u64().expect("below 2^40");
                factors.push((q, 2));
            } else {
                return Err(Error::Resource(format!(
                    "{n} has a cofactor {rest} with no prime factor below {FACTOR_TABLE_BOUND}"
                )));
            }
        }
    }
    Ok(Factorization { factors })
}

pub fn factorize_u64(n: u64) -> Result<Factorization> {
    factorize(&BigUint::from(n))
}

/// Product of the primes dividing `n` to odd multiplicity.
pub fn squarefree_part(n: &BigUint) -> Result<BigUint> {
    if n.is_zero() {
        return Err(Error::Domain("square-free part of 0 is undefined".into()));
    }
    Ok(factorize(n)?.squarefree_part())
}

pub fn squarefree_part_u64(n: u64) -> Result<u64> {
    let part = squarefree_part(&BigUint::from(n))?;
    Ok(part.to_u64().expect("divides n"))
}

/// Prime factors of `z` of odd multiplicity, ascending.
pub fn pi_odd(z: &BigUint) -> Result<Vec<u64>> {
    if z.is_zero() {
        return Err(Error::Domain("pi_odd(0) is undefined".into()));
    }
    Ok(factorize(z)?.odd_support())
}

pub fn pi_odd_u64(z: u64) -> Result<Vec<u64>> {
    pi_odd(&BigUint::from(z))
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Euler's criterion on a residue already reduced mod `p`; `p` must be an odd
/// prime.
#[inline]
pub fn legendre_residue(r: u64, p: u64) -> i8 {
    let r = r % p;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "Legendre symbol needs an odd prime modulus, got {p}"
        )));
    }
    if !is_prime(p)? {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(())
}

/// Legendre symbol `(z / p)` for an odd prime `p`.
pub fn legendre(z: i64, p: u64) -> Result<i8> {
    check_odd_prime(p)?;
    Ok(legendre_residue(
        (z as i128).rem_euclid(p as i128) as u64,
        p,
    ))
}

pub fn legendre_big(z: &BigInt, p: u64) -> Result<i8> {
    check_odd_prime(p)?;
    Ok(legendre_residue(reduce_mod(z, p), p))
}

/// `z mod p` in `[0, p)`.
pub fn reduce_mod(z: &BigInt, p: u64) -> u64 {
    let r = z.mod_floor(&BigInt::from(p));
    debug_assert!(r.sign() != Sign::Minus);
    r.to_u64().expect("reduced below p")
}

pub fn reduce_mod_unsigned(z: &BigUint, p: u64) -> u64 {
    (z % p).to_u64().expect("reduced below p")
}

/// Allocation cap for per-prime residue tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    bytes: u64,
}

impl MemoryBudget {
    pub const ENV_VAR: &'static str = "QRD_MEMORY_MB";

    pub fn from_megabytes(mb: u64) -> Self {
        MemoryBudget {
            bytes: mb.saturating_mul(1 << 20),
        }
    }

    /// Reads `QRD_MEMORY_MB`, falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .map(Self::from_megabytes)
                .map_err(|_| {
                    Error::Domain(format!("{} must be an integer, got {v:?}", Self::ENV_VAR))
                }),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn bytes(self) -> u64 {
        self.bytes
    }

    /// Largest modulus whose table fits.
    pub fn max_modulus(self) -> u64 {
        self.bytes
    }
}

impl Default for MemoryBudget {
    /// 16 MiB, i.e. tables for `p <= 2^24`.
    fn default() -> Self {
        MemoryBudget::from_megabytes(16)
    }
}

/// Quadratic-residue membership for every `z` in `[0, p)`.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    p: u64,
    is_residue: Vec<bool>,
}

impl ResidueTable {
    /// Builds the table by squaring `1..=(p-1)/2`.
    pub fn new(p: u64, budget: MemoryBudget) -> Result<Self> {
        check_odd_prime(p)?;
        if p > budget.max_modulus() {
            return Err(Error::Resource(format!(
                "residue table for p = {p} needs {p} bytes, budget is {} bytes",
                budget.bytes()
            )));
        }
        let mut is_residue = vec![false; p as usize];
        for x in 1..=(p - 1) / 2 {
            is_residue[mul_mod(x, x, p) as usize] = true;
        }
        Ok(ResidueTable { p, is_residue })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Legendre symbol of `z mod p`.
    #[inline]
    pub fn symbol(&self, z: u64) -> i8 {
        let r = (z % self.p) as usize;
        if r == 0 {
            0
        } else if self.is_residue[r] {
            1
        } else {
            -1
        }
    }

    pub fn residues(&self) -> impl Iterator<Item = u64> + '_ {
        self.is_residue
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(z, _)| z as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    fn brute_legendre(z: u64, p: u64) -> i8 {
        let z = z % p;
        if z == 0 {
            0
        } else if (1..p).any(|x| x * x % p == z) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn sieve_small_bounds() {
        assert_eq!(sieve_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
        assert_eq!(sieve_primes(3).unwrap().primes(), &[2, 3]);
        assert!(matches!(sieve_primes(1), Err(Error::Domain(_))));
        assert!(matches!(sieve_primes(0), Err(Error::Domain(_))));
    }

    #[test]
    fn sieve_matches_trial_division() {
        let table = sieve_primes(20_000).unwrap();
        let expected: Vec<u64> = (0..=20_000)
            .filter(|&n| trial_division_is_prime(n))
            .collect();
        assert_eq!(table.primes(), expected.as_slice());
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part_u64(12).unwrap(), 3);
        assert_eq!(squarefree_part_u64(1).unwrap(), 1);
        assert_eq!(squarefree_part_u64(18).unwrap(), 2);
        assert!(matches!(squarefree_part_u64(0), Err(Error::Domain(_))));
    }

    #[test]
    fn squarefree_invariant_up_to_ten_thousand() {
        for n in 1..=10_000u64 {
            let part = squarefree_part_u64(n).unwrap();
            assert_eq!(n % part, 0);
            let quotient = n / part;
            let root = (quotient as f64).sqrt().round() as u64;
            assert_eq!(root * root, quotient, "n = {n}");
            // square-free: no p^2 divides part
            assert!((2..=part)
                .take_while(|d| d * d <= part)
                .all(|d| !part.is_multiple_of(d * d)));
            // pi_odd is the support of the square-free part
            let support: Vec<u64> = (2..=part)
                .filter(|&d| part.is_multiple_of(d) && trial_division_is_prime(d))
                .collect();
            assert_eq!(pi_odd_u64(n).unwrap(), support, "n = {n}");
        }
    }

    #[test]
    fn pi_odd_examples() {
        assert_eq!(pi_odd_u64(12).unwrap(), vec![3]);
        assert!(pi_odd_u64(36).unwrap().is_empty());
        assert_eq!(pi_odd_u64(30).unwrap(), vec![2, 3, 5]);
    }

    #[test]
    fn factorization_of_large_values() {
        let n = BigUint::from(2u64 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23 * 29)
            * BigUint::from(31u64 * 37 * 41 * 43 * 47);
        let f = factorize(&n).unwrap();
        assert_eq!(f.value(), n);
        assert_eq!(f.factors().len(), 15);
        // cofactor prime just above the table bound
        let big_prime = 1_048_583u64;
        assert!(trial_division_is_prime(big_prime));
        let f = factorize_u64(4 * big_prime).unwrap();
        assert_eq!(f.factors(), &[(2, 2), (big_prime, 1)]);
        let f = factorize(&(BigUint::from(big_prime) * big_prime * 3u32)).unwrap();
        assert_eq!(f.factors(), &[(3, 1), (big_prime, 2)]);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(1, 3).unwrap(), 1);
        assert_eq!(legendre(1, 101).unwrap(), 1);
        assert_eq!(legendre(2, 7).unwrap(), 1);
        assert_eq!(legendre(3, 7).unwrap(), -1);
        assert_eq!(legendre(14, 7).unwrap(), 0);
        assert_eq!(legendre(-1, 7).unwrap(), -1);
        assert_eq!(legendre(-1, 5).unwrap(), 1);
        assert!(matches!(legendre(1, 2), Err(Error::Domain(_))));
        assert!(matches!(legendre(1, 9), Err(Error::Domain(_))));
        assert!(matches!(legendre(1, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn euler_criterion_matches_brute_force() {
        let table = sieve_primes(1000).unwrap();
        for &p in table.odd_primes() {
            for z in 1..p {
                assert_eq!(
                    legendre(z as i64, p).unwrap(),
                    brute_legendre(z, p),
                    "z={z} p={p}"
                );
            }
        }
    }

    #[test]
    fn residue_table_examples() {
        let t3 = ResidueTable::new(3, MemoryBudget::default()).unwrap();
        assert_eq!((t3.symbol(1), t3.symbol(2)), (1, -1));
        let t7 = ResidueTable::new(7, MemoryBudget::default()).unwrap();
        assert_eq!(t7.residues().collect::<Vec<_>>(), vec![1, 2, 4]);
        for &p in sieve_primes(2000).unwrap().odd_primes() {
            let t = ResidueTable::new(p, MemoryBudget::default()).unwrap();
            assert_eq!(t.residues().count() as u64, (p - 1) / 2);
        }
    }

    #[test]
    fn residue_table_respects_budget() {
        let tiny = MemoryBudget::from_megabytes(0);
        assert!(matches!(
            ResidueTable::new(7, tiny),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            ResidueTable::new(9, MemoryBudget::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn primality_helper() {
        assert!(is_prime(1_000_003).unwrap());
        assert!(!is_prime(1_000_001).unwrap());
        assert!(is_prime(1_099_511_627_689).is_ok());
    }
}
