use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::diagrams::{essential_and_cells, is_essential, CellDecomposition, QuotientDiagram};
use crate::error::{check_limit, Result};
use crate::gf2::{self, PrimeUniverse};
use crate::indexset::IndexSet;
use crate::tuples::{KMaxFamily, TupleStructure};
use crate::union_find::UnionFind;

/// Cap on `|K|` when enumerating `ℰ(K)`.
pub const MAX_K_SIZE: usize = 20;

/// One element `I` of `Λ′(𝒦)` with `S(I)` and `Z(I)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaRep {
    #[serde(rename = "I")]
    pub i: IndexSet,
    #[serde(rename = "S", with = "crate::bigjson::vec")]
    pub s_values: Vec<BigUint>,
    #[serde(rename = "Z")]
    pub z: IndexSet,
}

/// `Λ′(𝒦)`: one representative per distinct `S(I)` with `|S(I)| ≥ 2`,
/// ordered lexicographically by `I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LambdaPrime {
    reps: Vec<LambdaRep>,
}

impl LambdaPrime {
    pub fn reps(&self) -> &[LambdaRep] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Ids of the distinct values of `σ`, numbered by first occurrence.
pub(crate) fn sigma_class_ids(sigma: &[BigUint]) -> Vec<usize> {
    let mut ids: Vec<&BigUint> = Vec::new();
    sigma
        .iter()
        .map(|s| match ids.iter().position(|x| *x == s) {
            Some(i) => i,
            None => {
                ids.push(s);
                ids.len() - 1
            }
        })
        .collect()
}

/// Enumerates the even subsets of every `K ∈ 𝒦_max`, drops those with
/// `|S(I)| < 2`, keeps the lexicographically smallest `I` per `S(I)`, and
/// sets `Z(I)` to the smallest index of each `σ` value in `I`.
pub fn lambda_prime(kmax: &KMaxFamily, st: &TupleStructure) -> Result<LambdaPrime> {
    let ids = sigma_class_ids(st.sigma());
    let s_mask = |i: IndexSet| i.iter().fold(0u64, |acc, x| acc | 1 << ids[x]);
    let mut best: BTreeMap<u64, IndexSet> = BTreeMap::new();
    for &k in kmax.members() {
        check_limit("|K| for K in K_max", k.len(), MAX_K_SIZE)?;
        if s_mask(k).count_ones() < 2 {
            continue;
        }
        for i in k.subsets() {
            if i.len() < 2 || i.len() % 2 == 1 {
                continue;
            }
            let m = s_mask(i);
            if m.count_ones() < 2 {
                continue;
            }
            best.entry(m)
                .and_modify(|cur| {
                    if i < *cur {
                        *cur = i;
                    }
                })
                .or_insert(i);
        }
    }
    let mut reps: Vec<LambdaRep> = best
        .into_values()
        .map(|i| {
            let mut seen = 0u64;
            let mut z = IndexSet::EMPTY;
            for x in i.iter() {
                if seen & 1 << ids[x] == 0 {
                    seen |= 1 << ids[x];
                    z.insert(x);
                }
            }
            let s_values: BTreeSet<BigUint> = i.iter().map(|x| st.sigma()[x].clone()).collect();
            LambdaRep {
                i,
                s_values: s_values.into_iter().collect(),
                z,
            }
        })
        .collect();
    reps.sort_by_key(|a| a.i);
    Ok(LambdaPrime { reps })
}

/// `Σ = ⋃ Z(I)`.
pub fn sigma_set(lp: &LambdaPrime) -> IndexSet {
    lp.reps
        .iter()
        .fold(IndexSet::EMPTY, |acc, r| acc.union(r.z))
}

/// `⋃ K(C)` over the essential columns of the quotient diagram.
pub fn sigma_set_by_columns(qd: &QuotientDiagram, st: &TupleStructure) -> IndexSet {
    qd.blocks()
        .iter()
        .flat_map(|b| b.columns())
        .filter(|c| is_essential(c, st.sigma()))
        .fold(IndexSet::EMPTY, |acc, c| acc.union(c.k()))
}

/// `Σ/~`: components of the graph on `Σ` joining `i, j` whenever both lie in
/// `K(C)` for one essential column `C`. Ordered by smallest member.
pub fn tilde_classes(sigma: IndexSet, qd: &QuotientDiagram, st: &TupleStructure) -> Vec<IndexSet> {
    let mut uf = UnionFind::new(st.k());
    for c in qd.blocks().iter().flat_map(|b| b.columns()) {
        if !is_essential(c, st.sigma()) {
            continue;
        }
        let members = c.k().intersection(sigma);
        if let Some(first) = members.min() {
            for x in members.iter() {
                uf.union(first, x);
            }
        }
    }
    uf.groups()
        .into_iter()
        .map(|g| IndexSet::from_iter(g.into_iter().filter(|&x| sigma.contains(x))))
        .filter(|g| !g.is_empty())
        .collect()
}

/// `Λ′/≃`: components under nonempty intersection of the `Z` sets, as lists
/// of positions into `lp.reps()`, ordered by first position.
pub fn simeq_classes(lp: &LambdaPrime) -> Vec<Vec<usize>> {
    let n = lp.reps.len();
    let mut uf = UnionFind::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if lp.reps[a].z.intersects(lp.reps[b].z) {
                uf.union(a, b);
            }
        }
    }
    uf.groups()
}

/// `Φ(ϖ) = {X ∈ Λ′ : Z(X) ⊆ ϖ}` as positions.
pub fn phi(lp: &LambdaPrime, varpi: IndexSet) -> Vec<usize> {
    (0..lp.reps.len())
        .filter(|&x| lp.reps[x].z.is_subset(varpi))
        .collect()
}

/// Checks that `Φ` maps `Σ/~` bijectively onto `Λ′/≃` with inverse "union of
/// the `Z` sets". Returns a description of the first failure.
pub fn check_proposition_35(
    lp: &LambdaPrime,
    tilde: &[IndexSet],
    simeq: &[Vec<usize>],
) -> std::result::Result<(), String> {
    if tilde.len() != simeq.len() {
        return Err(format!(
            "|Σ/~| = {} but |Λ′/≃| = {}",
            tilde.len(),
            simeq.len()
        ));
    }
    let mut hit = vec![false; simeq.len()];
    for &varpi in tilde {
        let image = phi(lp, varpi);
        let Some(pos) = simeq.iter().position(|c| *c == image) else {
            return Err(format!("Φ({varpi}) = {image:?} is not a ≃-class"));
        };
        if std::mem::replace(&mut hit[pos], true) {
            return Err(format!("Φ is not injective at {varpi}"));
        }
        let union = image
            .iter()
            .fold(IndexSet::EMPTY, |acc, &x| acc.union(lp.reps[x].z));
        if union != varpi {
            return Err(format!(
                "union of Z over Φ({varpi}) is {union}, not {varpi}"
            ));
        }
    }
    Ok(())
}

/// Independence condition on `Σ`, evaluated two ways.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition39 {
    /// `σ_i` pairwise distinct on `Σ`.
    pub distinct: bool,
    /// Non-unit `v(π(σ_i))` linearly independent (rank test).
    pub independent: bool,
    /// Same by the symmetric-difference test; `None` past the family cap.
    pub independent_by_symdiff: Option<bool>,
}

impl Condition39 {
    pub fn holds(&self) -> bool {
        self.distinct && self.independent
    }
}

pub fn check_condition_39(sigma: IndexSet, st: &TupleStructure) -> Result<Condition39> {
    let values: Vec<&BigUint> = sigma.iter().map(|i| &st.sigma()[i]).collect();
    let distinct = values.iter().collect::<BTreeSet<_>>().len() == values.len();
    let sets: Vec<Vec<u64>> = sigma
        .iter()
        .map(|i| st.sigma_primes()[i].clone())
        .filter(|p| !p.is_empty())
        .collect();
    let universe = PrimeUniverse::spanning(sets.iter().map(Vec::as_slice))?;
    let vectors = sets
        .iter()
        .map(|s| gf2::vector_of(s, &universe))
        .collect::<Result<Vec<_>>>()?;
    let independent = gf2::is_independent_set(&vectors)?;
    let independent_by_symdiff = if vectors.len() <= gf2::MAX_SYMDIFF_FAMILY {
        Some(gf2::is_independent_by_symdiff(&vectors)?)
    } else {
        None
    };
    Ok(Condition39 {
        distinct,
        independent,
        independent_by_symdiff,
    })
}

/// Cells computed with the given `Σ`.
pub fn cells(qd: &QuotientDiagram, st: &TupleStructure, sigma: IndexSet) -> CellDecomposition {
    essential_and_cells(qd, st, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::quotient_diagram;
    use crate::tuples::{build_structure, kmax_direct, StandardTuple};

    fn setup(a: &[u64], b: &[u64], s: u32) -> (TupleStructure, KMaxFamily) {
        let st = build_structure(&StandardTuple::from_u64(a, b, s).unwrap()).unwrap();
        let kmax = kmax_direct(&st);
        (st, kmax)
    }

    fn labels(sets: &[IndexSet]) -> Vec<Vec<usize>> {
        sets.iter().map(|s| s.labels()).collect()
    }

    #[test]
    fn reference_lambda_prime() {
        let (st, kmax) = setup(&[1, 9], &[2, 6], 2);
        let lp = lambda_prime(&kmax, &st).unwrap();
        assert_eq!(lp.len(), 1);
        assert_eq!(lp.reps()[0].i.labels(), vec![1, 2]);
        assert_eq!(lp.reps()[0].z.labels(), vec![1, 2]);
        assert_eq!(
            lp.reps()[0].s_values,
            vec![BigUint::from(2u32), BigUint::from(6u32)]
        );
        assert_eq!(sigma_set(&lp).labels(), vec![1, 2]);
    }

    #[test]
    fn equal_sigma_gives_empty() {
        let (st, kmax) = setup(&[1, 4], &[2, 8], 3);
        let lp = lambda_prime(&kmax, &st).unwrap();
        assert!(lp.is_empty());
        assert_eq!(sigma_set(&lp), IndexSet::EMPTY);
    }

    #[test]
    fn three_distinct_sigmas_in_one_column() {
        // Q_1 = Q_2 = Q_3 = {1}, σ = (2, 3, 6).
        let (st, kmax) = setup(&[2, 3, 6], &[2, 3, 6], 2);
        assert_eq!(kmax.members().len(), 1);
        let lp = lambda_prime(&kmax, &st).unwrap();
        let s_sets: Vec<Vec<u32>> = lp
            .reps()
            .iter()
            .map(|r| r.s_values.iter().map(|v| v.try_into().unwrap()).collect())
            .collect();
        assert_eq!(s_sets, vec![vec![2, 3], vec![2, 6], vec![3, 6]]);
        assert_eq!(sigma_set(&lp).labels(), vec![1, 2, 3]);
    }

    #[test]
    fn simeq_examples() {
        let (st, kmax) = setup(&[2, 3, 6], &[2, 3, 6], 2);
        let lp = lambda_prime(&kmax, &st).unwrap();
        assert_eq!(simeq_classes(&lp), vec![vec![0, 1, 2]]);
        let qd = quotient_diagram(&st);
        let tilde = tilde_classes(sigma_set(&lp), &qd, &st);
        assert_eq!(labels(&tilde), vec![vec![1, 2, 3]]);
        check_proposition_35(&lp, &tilde, &simeq_classes(&lp)).unwrap();
    }

    #[test]
    fn condition_39_examples() {
        let (st, _) = setup(&[1, 9], &[2, 6], 2);
        assert!(check_condition_39(IndexSet::full(2), &st).unwrap().holds());
        let (st, _) = setup(&[2, 3, 6], &[2, 3, 6], 2);
        let c = check_condition_39(IndexSet::full(3), &st).unwrap();
        assert!(c.distinct && !c.independent);
        assert_eq!(c.independent_by_symdiff, Some(false));
        let (st, _) = setup(&[1, 4], &[2, 8], 3);
        assert!(!check_condition_39(IndexSet::full(2), &st).unwrap().holds());
    }
}
