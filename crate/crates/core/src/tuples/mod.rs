//! Standard tuples `(a, b, s)`, their derived structure `B`, `A(b)`, `Q_i`,
//! `S_i`, `σ_i`, and the family `𝒦_max` of realised membership patterns.

mod generator;
mod rational;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{check_limit, Error, Result};
use crate::indexset::{IndexSet, MAX_INDEX};

pub use generator::{
    gaps_for_quotient_spec, generate_lemma38, lemma38_identity_holds, prime_mode, GeneratorSpec,
};
pub use rational::Rational;

/// Cap on `Σ_i |S_i|`, the number of candidate points enumerated.
pub const MAX_POINTS: usize = 1 << 20;

/// Input object. Invariants: `m = |a| = |b| ≥ 2`, every `b_j ≥ 1`, pairs
/// `(a_j, b_j)` pairwise distinct, `s ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTuple")]
pub struct StandardTuple {
    #[serde(with = "crate::bigjson::vec")]
    a: Vec<BigUint>,
    #[serde(with = "crate::bigjson::vec")]
    b: Vec<BigUint>,
    s: u32,
}

#[derive(Deserialize)]
struct RawTuple {
    #[serde(with = "crate::bigjson::vec")]
    a: Vec<BigUint>,
    #[serde(with = "crate::bigjson::vec")]
    b: Vec<BigUint>,
    s: u32,
}

impl TryFrom<RawTuple> for StandardTuple {
    type Error = Error;

    fn try_from(raw: RawTuple) -> Result<Self> {
        StandardTuple::new(raw.a, raw.b, raw.s)
    }
}

impl StandardTuple {
    pub fn new(a: Vec<BigUint>, b: Vec<BigUint>, s: u32) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidTuple(format!(
                "a has {} coordinates but b has {}",
                a.len(),
                b.len()
            )));
        }
        if a.len() < 2 {
            return Err(Error::InvalidTuple(format!(
                "m must be at least 2, got {}",
                a.len()
            )));
        }
        if s < 2 {
            return Err(Error::InvalidTuple(format!(
                "s must be at least 2, got {s}"
            )));
        }
        if let Some(j) = b.iter().position(Zero::is_zero) {
            return Err(Error::InvalidTuple(format!(
                "b_{} = 0; differences must be positive",
                j + 1
            )));
        }
        let mut seen = BTreeSet::new();
        for (j, pair) in a.iter().zip(&b).enumerate() {
            if !seen.insert(pair) {
                return Err(Error::InvalidTuple(format!(
                    "pair (a_{0}, b_{0}) = ({1}, {2}) repeats an earlier pair",
                    j + 1,
                    pair.0,
                    pair.1
                )));
            }
        }
        Ok(StandardTuple { a, b, s })
    }

    pub fn from_u64(a: &[u64], b: &[u64], s: u32) -> Result<Self> {
        StandardTuple::new(
            a.iter().map(|&x| BigUint::from(x)).collect(),
            b.iter().map(|&x| BigUint::from(x)).collect(),
            s,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawTuple =
            serde_json::from_str(text).map_err(|e| Error::InvalidTuple(e.to_string()))?;
        StandardTuple::try_from(raw)
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[BigUint] {
        &self.a
    }

    pub fn b(&self) -> &[BigUint] {
        &self.b
    }

    pub fn s(&self) -> u32 {
        self.s
    }
}

/// Derived structure. Index `i` (0-based) refers to the `i`-th distinct
/// value of `b` in first-occurrence order.
#[derive(Debug, Clone)]
pub struct TupleStructure {
    s: u32,
    b_values: Vec<BigUint>,
    a_sets: Vec<Vec<BigUint>>,
    q_sets: Vec<Vec<Rational>>,
    sigma: Vec<BigUint>,
    sigma_primes: Vec<Vec<u64>>,
    s_sets: Vec<BTreeSet<Rational>>,
    owners: BTreeMap<Rational, IndexSet>,
}

pub fn build_structure(t: &StandardTuple) -> Result<TupleStructure> {
    let mut b_values: Vec<BigUint> = Vec::new();
    let mut a_sets: Vec<Vec<BigUint>> = Vec::new();
    for (a, b) in t.a.iter().zip(&t.b) {
        match b_values.iter().position(|x| x == b) {
            Some(i) => a_sets[i].push(a.clone()),
            None => {
                b_values.push(b.clone());
                a_sets.push(vec![a.clone()]);
            }
        }
    }
    let k = b_values.len();
    if k > MAX_INDEX {
        return Err(Error::SizeLimit {
            what: "distinct differences k",
            actual: k,
            limit: MAX_INDEX,
        });
    }
    check_limit(
        "candidate points",
        t.m().saturating_mul(t.s as usize),
        MAX_POINTS,
    )?;
    for set in &mut a_sets {
        set.sort();
    }
    let mut q_sets = Vec::with_capacity(k);
    let mut owners: BTreeMap<Rational, IndexSet> = BTreeMap::new();
    for (i, (b, set)) in b_values.iter().zip(&a_sets).enumerate() {
        let mut qs: Vec<Rational> = set
            .iter()
            .map(|a| Rational::from_unsigned(a, b))
            .collect::<Result<_>>()?;
        qs.sort();
        for q in &qs {
            owners.entry(q.clone()).or_default().insert(i);
        }
        q_sets.push(qs);
    }
    let mut sigma = Vec::with_capacity(k);
    let mut sigma_primes = Vec::with_capacity(k);
    for b in &b_values {
        let f = arith::factorize(b)?;
        sigma.push(f.squarefree_part());
        sigma_primes.push(f.odd_support());
    }
    let s_sets = q_sets
        .iter()
        .map(|qs| {
            qs.iter()
                .flat_map(|q| (0..t.s as i64).map(move |j| q.add_int(j)))
                .collect()
        })
        .collect();
    Ok(TupleStructure {
        s: t.s,
        b_values,
        a_sets,
        q_sets,
        sigma,
        sigma_primes,
        s_sets,
        owners,
    })
}

impl TupleStructure {
    pub fn k(&self) -> usize {
        self.b_values.len()
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// `B` in first-occurrence order.
    pub fn b_values(&self) -> &[BigUint] {
        &self.b_values
    }

    /// `A(b_i)`, ascending.
    pub fn a_sets(&self) -> &[Vec<BigUint>] {
        &self.a_sets
    }

    /// `Q_i`, ascending.
    pub fn q_sets(&self) -> &[Vec<Rational>] {
        &self.q_sets
    }

    /// `σ_i`, the square-free part of `b_i`.
    pub fn sigma(&self) -> &[BigUint] {
        &self.sigma
    }

    /// `π(σ_i)`, ascending.
    pub fn sigma_primes(&self) -> &[Vec<u64>] {
        &self.sigma_primes
    }

    pub fn s_sets(&self) -> &[BTreeSet<Rational>] {
        &self.s_sets
    }

    /// `Q = ⋃ Q_i`, ascending and distinct.
    pub fn q_union(&self) -> Vec<Rational> {
        self.owners.keys().cloned().collect()
    }

    /// `{i : q ∈ Q_i}`; empty when `q ∉ Q`.
    pub fn owners(&self, q: &Rational) -> IndexSet {
        self.owners.get(q).copied().unwrap_or_default()
    }

    /// `κ = |⋃ S_i|`.
    pub fn kappa(&self) -> usize {
        self.s_sets.iter().flatten().collect::<BTreeSet<_>>().len()
    }

    /// `b = max B`.
    pub fn b_max(&self) -> &BigUint {
        self.b_values.iter().max().expect("k >= 1")
    }

    pub fn all_sigma_one(&self) -> bool {
        self.sigma_primes.iter().all(Vec::is_empty)
    }

    /// Membership pattern `{i : t ∈ S_i}` of every point of `⋃ S_i`.
    pub fn point_patterns(&self) -> BTreeMap<Rational, IndexSet> {
        let mut out: BTreeMap<Rational, IndexSet> = BTreeMap::new();
        for (i, set) in self.s_sets.iter().enumerate() {
            for t in set {
                out.entry(t.clone()).or_default().insert(i);
            }
        }
        out
    }
}

/// `𝒦_max`: nonempty index sets `K` with `T(K) ≠ ∅`, sorted
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KMaxFamily {
    members: Vec<IndexSet>,
}

impl KMaxFamily {
    pub fn from_members(members: impl IntoIterator<Item = IndexSet>) -> Self {
        let set: BTreeSet<IndexSet> = members.into_iter().filter(|m| !m.is_empty()).collect();
        KMaxFamily {
            members: set.into_iter().collect(),
        }
    }

    pub fn members(&self) -> &[IndexSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, k: IndexSet) -> bool {
        self.members.binary_search(&k).is_ok()
    }

    /// True iff `Λ(𝒦)` is empty.
    pub fn all_singletons(&self) -> bool {
        self.members.iter().all(|m| m.len() == 1)
    }
}

pub fn kmax_direct(st: &TupleStructure) -> KMaxFamily {
    KMaxFamily::from_members(st.point_patterns().into_values())
}

/// `b` pairwise distinct, `m ≥ 2` and `a_i b_j ≠ a_j b_i` for `i ≠ j`.
pub fn is_admissible(t: &StandardTuple) -> bool {
    let m = t.m();
    if m < 2 || t.b.iter().collect::<BTreeSet<_>>().len() != m {
        return false;
    }
    for i in 0..m {
        for j in i + 1..m {
            if &t.a[i] * &t.b[j] == &t.a[j] * &t.b[i] {
                return false;
            }
        }
    }
    true
}
