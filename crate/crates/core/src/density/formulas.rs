use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::lambda::{phi, Condition39, LambdaPrime};
use crate::arith;
use crate::error::{check_limit, Error, Result};
use crate::gf2::{self, no_odd_empty_symdiff, ParityItem, PrimeUniverse};
use crate::indexset::IndexSet;
use crate::tuples::{KMaxFamily, TupleStructure};

/// Cap on the family size accepted by [`lemma32_density`].
pub const MAX_FAMILY: usize = 12;
/// Cap on `|Λ′|` for the general-case enumerations.
pub const MAX_LAMBDA_PRIME: usize = 12;
/// Cap on `|Σ|` for the general-case enumerations.
pub const MAX_SIGMA: usize = 16;
/// Cap on `|ℳ₀|` for the brute-force partition count.
pub const MAX_PARTITION_FAMILY: usize = 20;

/// Everything the closed-form density formulas read.
#[derive(Debug, Clone, Copy)]
pub struct FormulaInputs<'a> {
    pub st: &'a TupleStructure,
    pub lp: &'a LambdaPrime,
    pub sigma_set: IndexSet,
    pub tilde: &'a [IndexSet],
    pub simeq: &'a [Vec<usize>],
}

/// `ℳ₁`, `i₀`, `ϖ₀`, `Φ(ϖ₀)` and `ε` when the distinct-and-independent
/// condition holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonM1 {
    /// Positions into `Λ′` of the representatives with `1 ∈ S(I)`.
    pub m1: Vec<usize>,
    pub i0: Option<usize>,
    pub varpi0: Option<IndexSet>,
    pub phi_varpi0: Option<Vec<usize>>,
    pub epsilon: u8,
}

impl<'a> FormulaInputs<'a> {
    pub fn mu(&self) -> usize {
        self.tilde.len()
    }

    pub fn sigma_count(&self) -> usize {
        self.sigma_set.len()
    }

    fn is_unit(&self, i: usize) -> bool {
        self.st.sigma_primes()[i].is_empty()
    }

    /// Positions of the representatives whose `S(I)` contains 1.
    pub fn m1(&self) -> Vec<usize> {
        (0..self.lp.len())
            .filter(|&x| self.lp.reps()[x].i.iter().any(|i| self.is_unit(i)))
            .collect()
    }

    pub fn m0(&self) -> Vec<usize> {
        let m1 = self.m1();
        (0..self.lp.len()).filter(|x| !m1.contains(x)).collect()
    }

    /// Indices of `Σ` with `σ_i = 1`.
    pub fn unit_indices(&self) -> Vec<usize> {
        self.sigma_set.iter().filter(|&i| self.is_unit(i)).collect()
    }

    fn class_of(&self, i: usize) -> Option<IndexSet> {
        self.tilde.iter().copied().find(|c| c.contains(i))
    }

    fn z_union(&self, positions: impl IntoIterator<Item = usize>) -> IndexSet {
        positions
            .into_iter()
            .fold(IndexSet::EMPTY, |acc, x| acc.union(self.lp.reps()[x].z))
    }

    /// Rank of `{v(π(σ_i)) : i ∈ Σ} ∖ {0}`.
    pub fn d(&self) -> Result<usize> {
        let sets: Vec<Vec<u64>> = self
            .sigma_set
            .iter()
            .map(|i| self.st.sigma_primes()[i].clone())
            .filter(|s| !s.is_empty())
            .collect();
        gf2::rank_of_prime_sets(&sets)
    }

    pub fn epsilon_and_m1(&self) -> Result<EpsilonM1> {
        let m1 = self.m1();
        if m1.is_empty() {
            return Ok(EpsilonM1 {
                m1,
                i0: None,
                varpi0: None,
                phi_varpi0: None,
                epsilon: 1,
            });
        }
        let units = self.unit_indices();
        let &[i0] = units.as_slice() else {
            return Err(Error::Consistency(format!(
                "expected exactly one index of Σ with square-free part 1, found {}",
                units.len()
            )));
        };
        let varpi0 = self
            .class_of(i0)
            .ok_or_else(|| Error::Consistency(format!("index {} lies in no class of Σ", i0 + 1)))?;
        let phi0 = phi(self.lp, varpi0);
        let epsilon = u8::from(m1 == phi0);
        Ok(EpsilonM1 {
            m1,
            i0: Some(i0),
            varpi0: Some(varpi0),
            phi_varpi0: Some(phi0),
            epsilon,
        })
    }
}

fn require_condition(cond: &Condition39, what: &str) -> Result<()> {
    if cond.holds() {
        Ok(())
    } else {
        Err(Error::WrongPath(format!(
            "{what} needs distinct square-free parts with independent prime supports on Σ; \
             use the general formula"
        )))
    }
}

/// `2^(μ−σ)` if `ℳ₁ = ∅` or `ℳ₁ = Φ(ϖ₀)`, otherwise `2^(1−σ)(2^μ − 1)`.
pub fn theorem37_density(inp: &FormulaInputs, cond: &Condition39) -> Result<Dyadic> {
    require_condition(cond, "the closed-form density")?;
    let (mu, sigma) = (inp.mu() as i64, inp.sigma_count() as i64);
    let e = inp.epsilon_and_m1()?;
    if e.m1.is_empty() || e.epsilon == 1 {
        Dyadic::pow2(mu - sigma)
    } else {
        Dyadic::scaled(pow2_minus(mu as u32, 1)?, 1 - sigma)
    }
}

/// `2^n − c` as an integer.
fn pow2_minus(n: u32, c: i128) -> Result<i128> {
    1i128
        .checked_shl(n)
        .filter(|&x| x > 0)
        .map(|x| x - c)
        .ok_or_else(|| Error::Domain(format!("2^{n} overflows")))
}

/// Partitions `{P₁, P₂}` of `members` into two nonempty blocks, each
/// produced once with `members[0] ∈ P₁`.
fn two_partitions(members: &[usize]) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> + '_ {
    let n = members.len();
    let count = if n < 2 { 0 } else { 1u64 << (n - 1) };
    (1..count).map(move |mask| {
        let (mut p1, mut p2) = (vec![members[0]], Vec::new());
        for (j, &x) in members.iter().enumerate().skip(1) {
            if mask >> (j - 1) & 1 == 1 {
                p2.push(x);
            } else {
                p1.push(x);
            }
        }
        (p1, p2)
    })
}

/// Whether the parity condition on `Z` unions holds with `P₁` joined to `ℳ₁`.
fn separated(inp: &FormulaInputs, m1: IndexSet, p1: &[usize], p2: &[usize]) -> bool {
    !m1.union(inp.z_union(p1.iter().copied()))
        .intersects(inp.z_union(p2.iter().copied()))
}

/// `|𝒫_∅(ℳ₀, 2)|` by enumeration: unordered partitions of `ℳ₀` for which the
/// `Z` union of `ℳ₁ ∪ P₁` misses that of `P₂` in at least one orientation.
pub fn p_empty_count(inp: &FormulaInputs) -> Result<u64> {
    let m0 = inp.m0();
    check_limit("|M0|", m0.len(), MAX_PARTITION_FAMILY)?;
    let m1 = inp.z_union(inp.m1());
    Ok(two_partitions(&m0)
        .filter(|(p1, p2)| separated(inp, m1, p1, p2) || separated(inp, m1, p2, p1))
        .count() as u64)
}

/// Closed form for `2|𝒫_∅(ℳ₀, 2)|` under the distinct-and-independent
/// condition: `2^μ − 2`, or `2^(μ−1) − 2` when `∅ ≠ ℳ₁ = Φ(ϖ₀)`.
pub fn p_empty_closed_twice(inp: &FormulaInputs) -> Result<i128> {
    let e = inp.epsilon_and_m1()?;
    let mu = inp.mu() as u32;
    if !e.m1.is_empty() && e.epsilon == 1 {
        if mu == 0 {
            return Err(Error::Consistency("ℳ₁ nonempty with μ = 0".into()));
        }
        pow2_minus(mu - 1, 2)
    } else {
        pow2_minus(mu, 2)
    }
}

/// The breakdown behind [`eq312_density`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionFormula {
    pub d: usize,
    pub epsilon: u8,
    /// `2|𝒫_∅(ℳ₀, 2)|` as used.
    pub twice_p_empty: i128,
    /// Whether `twice_p_empty` came from enumeration.
    pub enumerated: bool,
    pub density: Dyadic,
}

/// `2^(−d)(1 + ε + 2|𝒫_∅(ℳ₀, 2)|)` with `ε = 1` iff the `Z` unions of `ℳ₀`
/// and `ℳ₁` are disjoint. The partition count is enumerated when `ℳ₀ ≠ ∅`;
/// for `ℳ₀ = ∅` the closed form is used as an integer.
pub fn eq312_density(inp: &FormulaInputs, cond: &Condition39) -> Result<PartitionFormula> {
    require_condition(cond, "the partition formula")?;
    let d = inp.d()?;
    let (m0, m1) = (inp.m0(), inp.m1());
    let epsilon = u8::from(!inp.z_union(m0.clone()).intersects(inp.z_union(m1)));
    let (twice_p_empty, enumerated) = if !m0.is_empty() && m0.len() <= MAX_PARTITION_FAMILY {
        (2 * p_empty_count(inp)? as i128, true)
    } else {
        (p_empty_closed_twice(inp)?, false)
    };
    let num = 1 + epsilon as i128 + twice_p_empty;
    Ok(PartitionFormula {
        d,
        epsilon,
        twice_p_empty,
        enumerated,
        density: Dyadic::scaled(num, -(d as i64))?,
    })
}

/// Whether some `N` has odd intersection with every set of `odd` and even
/// intersection with every set of `even`.
fn parity_feasible(odd: &[&Vec<u64>], even: &[&Vec<u64>]) -> Result<bool> {
    let odd: BTreeSet<Vec<u64>> = odd.iter().map(|s| (*s).clone()).collect();
    let even: BTreeSet<Vec<u64>> = even.iter().map(|s| (*s).clone()).collect();
    if odd.contains(&Vec::new()) || odd.intersection(&even).next().is_some() {
        return Ok(false);
    }
    let odd: Vec<Vec<u64>> = odd.into_iter().collect();
    let even: Vec<Vec<u64>> = even.into_iter().collect();
    gf2::symdiff_criterion(&odd, &even)
}

/// Density of the primes for which every set of the family is made of
/// residues only or of non-residues only. Each set is given by the odd prime
/// supports `π(z)` of its square-free elements, the empty support standing
/// for `z = 1`.
pub fn lemma32_density_prime_sets(family: &[Vec<Vec<u64>>]) -> Result<Dyadic> {
    check_limit("family size", family.len(), MAX_FAMILY)?;
    if family.iter().any(Vec::is_empty) {
        return Err(Error::Domain("family members must be nonempty".into()));
    }
    let normalized: Vec<Vec<Vec<u64>>> = family
        .iter()
        .map(|set| {
            set.iter()
                .map(|p| {
                    p.iter()
                        .copied()
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect()
                })
                .collect()
        })
        .collect();
    let (m1, m0): (Vec<usize>, Vec<usize>) =
        (0..normalized.len()).partition(|&x| normalized[x].iter().any(Vec::is_empty));
    let all: Vec<Vec<u64>> = normalized
        .iter()
        .flatten()
        .filter(|s| !s.is_empty())
        .cloned()
        .collect();
    let d = gf2::rank_of_prime_sets(&all)?;
    let gather = |groups: &[&[usize]]| -> Vec<&Vec<u64>> {
        groups
            .iter()
            .flat_map(|g| g.iter())
            .flat_map(|&x| normalized[x].iter())
            .collect()
    };
    let mut total: i128 = 1;
    if !m0.is_empty() && parity_feasible(&gather(&[&m0]), &gather(&[&m1]))? {
        total += 1;
    }
    for (p1, p2) in two_partitions(&m0) {
        if parity_feasible(&gather(&[&p2]), &gather(&[&m1, &p1]))? {
            total += 1;
        }
        if parity_feasible(&gather(&[&p1]), &gather(&[&m1, &p2]))? {
            total += 1;
        }
    }
    Dyadic::scaled(total, -(d as i64))
}

/// [`lemma32_density_prime_sets`] on sets of square-free integers.
pub fn lemma32_density(family: &[Vec<u64>]) -> Result<Dyadic> {
    let sets = family
        .iter()
        .map(|set| {
            set.iter()
                .map(|&z| {
                    if z == 0 || arith::squarefree_part_u64(z)? != z {
                        return Err(Error::Domain(format!(
                            "{z} is not a square-free positive integer"
                        )));
                    }
                    arith::pi_odd_u64(z)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    lemma32_density_prime_sets(&sets)
}

/// The family `{S(I) : I ∈ Λ′}` as prime supports.
pub fn lambda_family(inp: &FormulaInputs) -> Vec<Vec<Vec<u64>>> {
    inp.lp
        .reps()
        .iter()
        .map(|r| {
            r.z.iter()
                .map(|i| inp.st.sigma_primes()[i].clone())
                .collect()
        })
        .collect()
}

/// Parameters of the general formulas, valid whether or not the
/// distinct-and-independent condition holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralParameters {
    pub alpha: u64,
    /// Present iff `ℳ₁ ≠ ∅`.
    pub beta: Option<u64>,
    /// Present iff `ℳ₁ ≠ ∅`.
    pub omega: Option<u64>,
    /// Present iff `ℳ₁ ≠ ∅`.
    pub epsilon: Option<u8>,
    /// `ℳ₁ = ⋃_{ϖ∈Ω} Φ(ϖ)`; present iff `ℳ₁ ≠ ∅`.
    pub m1_is_omega_union: Option<bool>,
    pub d: u64,
    pub mu: u64,
    /// `|𝒫_∅(ℳ₀, 2)|` by enumeration.
    pub p_empty: u64,
    /// The closed form for `|𝒫_∅(ℳ₀, 2)|`.
    pub p_empty_closed: i128,
}

/// Context for the odd-subset test: distinct supports of `Σ` as bit rows.
struct SupportItems {
    rows: Vec<Vec<u64>>,
    index_row: Vec<Option<usize>>,
}

impl SupportItems {
    fn new(inp: &FormulaInputs) -> Result<Self> {
        let sets: Vec<&[u64]> = inp
            .sigma_set
            .iter()
            .map(|i| inp.st.sigma_primes()[i].as_slice())
            .collect();
        let universe = PrimeUniverse::spanning(sets.iter().copied())?;
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut index_row = vec![None; inp.st.k()];
        for i in inp.sigma_set.iter() {
            let w = gf2::vector_of(&inp.st.sigma_primes()[i], &universe)?
                .words()
                .to_vec();
            let w = if w.is_empty() { vec![0] } else { w };
            let pos = rows.iter().position(|r| *r == w).unwrap_or_else(|| {
                rows.push(w);
                rows.len() - 1
            });
            index_row[i] = Some(pos);
        }
        Ok(SupportItems { rows, index_row })
    }

    fn width(&self) -> usize {
        self.rows.first().map_or(1, Vec::len)
    }

    fn rows_of(&self, indices: IndexSet) -> BTreeSet<usize> {
        indices.iter().filter_map(|i| self.index_row[i]).collect()
    }

    /// Items `rows ∪ ({∅} if with_empty)`, even side = rows of `even` plus `∅`
    /// when it is added.
    fn items(&self, even: IndexSet, with_empty: bool) -> Vec<ParityItem> {
        let even_rows = self.rows_of(even);
        let zero = vec![0u64; self.width()];
        let mut items: Vec<ParityItem> = self
            .rows
            .iter()
            .enumerate()
            .map(|(r, w)| ParityItem {
                words: w.clone(),
                even_side: even_rows.contains(&r) || (with_empty && *w == zero),
            })
            .collect();
        if with_empty && !self.rows.contains(&zero) {
            items.push(ParityItem {
                words: zero,
                even_side: true,
            });
        }
        items
    }
}

/// `α`, `β`, `ω`, `ε`, `d` and `|𝒫_∅(ℳ₀, 2)|` by enumeration. Partitions of
/// `Λ′` range over unions of `≃`-classes; `P₁` is the block containing the
/// first class for `α` and the block joined to `ℳ₁` for `β`.
pub fn general_parameters(inp: &FormulaInputs) -> Result<GeneralParameters> {
    check_limit("|Λ′|", inp.lp.len(), MAX_LAMBDA_PRIME)?;
    check_limit("|Σ|", inp.sigma_count(), MAX_SIGMA)?;
    let items = SupportItems::new(inp)?;
    let d = inp.d()? as u64;
    let mu = inp.mu();
    let (m0, m1) = (inp.m0(), inp.m1());
    let m1_z = inp.z_union(m1.iter().copied());
    let p_empty = p_empty_count(inp)?;

    let classes = inp.simeq;
    let mut alpha = 0u64;
    if classes.len() >= 2 {
        check_limit("≃-classes", classes.len(), 63)?;
        for mask in 1..1u64 << (classes.len() - 1) {
            let p1 = (0..classes.len())
                .filter(|&c| c == 0 || mask >> (c - 1) & 1 == 0)
                .flat_map(|c| classes[c].iter().copied());
            if !no_odd_empty_symdiff(&items.items(inp.z_union(p1), true))? {
                alpha += 1;
            }
        }
    }

    if m1.is_empty() {
        return Ok(GeneralParameters {
            alpha,
            beta: None,
            omega: None,
            epsilon: None,
            m1_is_omega_union: None,
            d,
            mu: mu as u64,
            p_empty,
            p_empty_closed: pow2_minus(mu.saturating_sub(1) as u32, 1)?,
        });
    }

    let mut beta = 0u64;
    for (p1, p2) in two_partitions(&m0) {
        let side = if separated(inp, m1_z, &p1, &p2) {
            p1
        } else if separated(inp, m1_z, &p2, &p1) {
            p2
        } else {
            continue;
        };
        let even = m1_z.union(inp.z_union(side));
        if !no_odd_empty_symdiff(&items.items(even, false))? {
            beta += 1;
        }
    }

    let omega_classes: Vec<IndexSet> = inp
        .tilde
        .iter()
        .copied()
        .filter(|&w| phi(inp.lp, w).iter().any(|x| m1.contains(x)))
        .collect();
    let omega = omega_classes.len();
    let omega_union: BTreeSet<usize> = omega_classes.iter().flat_map(|&w| phi(inp.lp, w)).collect();
    let m1_set: BTreeSet<usize> = m1.iter().copied().collect();
    let m1_is_omega_union = m1_set == omega_union;
    let epsilon = u8::from(m1_is_omega_union && no_odd_empty_symdiff(&items.items(m1_z, false))?);
    let p_empty_closed = if !m1_is_omega_union {
        pow2_minus((mu - omega) as u32, 1)?
    } else if mu == omega {
        0
    } else {
        pow2_minus((mu - omega - 1) as u32, 1)?
    };
    Ok(GeneralParameters {
        alpha,
        beta: Some(beta),
        omega: Some(omega as u64),
        epsilon: Some(epsilon),
        m1_is_omega_union: Some(m1_is_omega_union),
        d,
        mu: mu as u64,
        p_empty,
        p_empty_closed,
    })
}

/// `2^(1−d)(2^(μ−1) − α)` if `ℳ₁ = ∅`; `2^(−d)(2^(μ−ω+1) − 2β − 1)` if
/// `ℳ₁ ≠ ⋃_Ω Φ(ϖ)`; `2^(−d)(2^(μ−ω) − 2β + ε − 1)` otherwise.
pub fn general_density(g: &GeneralParameters) -> Result<Dyadic> {
    let d = -(g.d as i64);
    let mu = g.mu as u32;
    let (Some(beta), Some(omega), Some(eps), Some(eq)) =
        (g.beta, g.omega, g.epsilon, g.m1_is_omega_union)
    else {
        let num = pow2_minus(mu, 2 * g.alpha as i128)?;
        return Dyadic::scaled(num, d);
    };
    let base = mu
        .checked_sub(omega as u32)
        .ok_or_else(|| Error::Consistency("ω exceeds μ".into()))?;
    let num = if eq {
        pow2_minus(base, 2 * beta as i128 - eps as i128 + 1)?
    } else {
        pow2_minus(base + 1, 2 * beta as i128 + 1)?
    };
    Dyadic::scaled(num, d)
}

/// `2^(−r)` where `r` is the rank of `v(π(σ_i)) + v(π(σ_j))` over pairs
/// `i, j` sharing a member of `𝒦_max`: the exact density of the primes whose
/// signature is all ones.
pub fn signature_density(kmax: &KMaxFamily, st: &TupleStructure) -> Result<(Dyadic, usize)> {
    let universe = PrimeUniverse::spanning(st.sigma_primes().iter().map(Vec::as_slice))?;
    let vectors = st
        .sigma_primes()
        .iter()
        .map(|p| gf2::vector_of(p, &universe))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for k in kmax.members() {
        let Some(first) = (*k).min() else { continue };
        for j in k.iter().skip(1) {
            let row: Vec<u64> = vectors[first]
                .words()
                .iter()
                .zip(vectors[j].words())
                .map(|(a, b)| a ^ b)
                .collect();
            if row.iter().any(|&w| w != 0) {
                rows.push(row);
            }
        }
    }
    let r = gf2::rank_of_rows(rows);
    Ok((Dyadic::pow2(-(r as i64))?, r))
}
