use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::StandardTuple;
use crate::arith;
use crate::error::{Error, Result};

/// Recurrence `a_{i+1} = t_i (a_i + d_i b_i)`, `b_{i+1} = t_i b_i`, so that
/// `q_{i+1} = q_i + d_i`.
pub fn generate_lemma38(
    gaps: &[u64],
    seed: (u64, u64),
    multipliers: &[u64],
    s: u32,
) -> Result<StandardTuple> {
    if gaps.is_empty() {
        return Err(Error::Domain("need at least one gap (k >= 2)".into()));
    }
    if multipliers.len() != gaps.len() {
        return Err(Error::Domain(format!(
            "{} gaps but {} multipliers",
            gaps.len(),
            multipliers.len()
        )));
    }
    if let Some(&g) = gaps.iter().find(|&&g| g == 0) {
        return Err(Error::Domain(format!("gaps must be positive, got {g}")));
    }
    if let Some(&t) = multipliers.iter().find(|&&t| t < 2) {
        return Err(Error::Domain(format!("multipliers must be >= 2, got {t}")));
    }
    if seed.0 == 0 || seed.1 == 0 {
        return Err(Error::Domain("seed (a_1, b_1) must be positive".into()));
    }
    let mut a = vec![BigUint::from(seed.0)];
    let mut b = vec![BigUint::from(seed.1)];
    for (&d, &t) in gaps.iter().zip(multipliers) {
        let (ai, bi) = (a.last().unwrap(), b.last().unwrap());
        let next_a = (ai + bi * d) * t;
        let next_b = bi * t;
        a.push(next_a);
        b.push(next_b);
    }
    StandardTuple::new(a, b, s)
}

/// Prime mode: `(a_1, b_1) = (1, 2)` and multipliers `3, 5, 7, …`, so every
/// `b_i` is square-free and `π(b_i) ⊊ π(b_{i+1})`.
pub fn prime_mode(gaps: &[u64], s: u32) -> Result<StandardTuple> {
    let table = arith::sieve_primes(64 * (gaps.len() as u64 + 4))?;
    let multipliers: Vec<u64> = table
        .odd_primes()
        .iter()
        .copied()
        .take(gaps.len())
        .collect();
    generate_lemma38(gaps, (1, 2), &multipliers, s)
}

/// Checks `a_i b_j − a_j b_i = (Σ_{r=j}^{i−1} d_r) b_i b_j` for all `i > j`.
pub fn lemma38_identity_holds(t: &StandardTuple, gaps: &[u64]) -> bool {
    let (a, b) = (t.a(), t.b());
    if gaps.len() + 1 != a.len() {
        return false;
    }
    for i in 0..a.len() {
        let mut sum = 0u128;
        for j in (0..i).rev() {
            sum += gaps[j] as u128;
            let lhs = &a[i] * &b[j];
            let rhs = &a[j] * &b[i] + BigUint::from(sum) * &b[i] * &b[j];
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Concatenates per-block gap sequences with the separator `s` between
/// consecutive blocks. Every block gap must lie in `[1, s−1]`.
pub fn gaps_for_quotient_spec(blocks: &[Vec<u64>], s: u64) -> Result<Vec<u64>> {
    if blocks.is_empty() {
        return Err(Error::Domain("need at least one block".into()));
    }
    let mut out = Vec::new();
    for (n, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::Domain(format!(
                "block {} has a single row; blocks need at least 2 rows",
                n + 1
            )));
        }
        if let Some(&g) = block.iter().find(|&&g| g == 0 || g >= s) {
            return Err(Error::Domain(format!(
                "block {} has gap {g}; block gaps must lie in [1, {}]",
                n + 1,
                s.saturating_sub(1)
            )));
        }
        if n > 0 {
            out.push(s);
        }
        out.extend_from_slice(block);
    }
    Ok(out)
}

/// Generator input: `{"gaps":[…], "seed":[a1,b1], "multipliers":[…]}` or
/// `{"gaps":[…], "prime_mode":true}`; `"blocks":[[…],…]` may replace
/// `"gaps"`, and `"s"` defaults to 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<(u64, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<Vec<u64>>,
    #[serde(default)]
    pub prime_mode: bool,
    #[serde(default = "default_s")]
    pub s: u32,
}

fn default_s() -> u32 {
    2
}

impl GeneratorSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("generator spec: {e}")))
    }

    pub fn resolved_gaps(&self) -> Result<Vec<u64>> {
        match (&self.gaps, &self.blocks) {
            (Some(g), None) => Ok(g.clone()),
            (None, Some(blocks)) => gaps_for_quotient_spec(blocks, self.s as u64),
            _ => Err(Error::Domain(
                "generator spec needs exactly one of \"gaps\" or \"blocks\"".into(),
            )),
        }
    }

    pub fn generate(&self) -> Result<StandardTuple> {
        let gaps = self.resolved_gaps()?;
        if self.prime_mode {
            if self.seed.is_some() || self.multipliers.is_some() {
                return Err(Error::Domain(
                    "prime_mode fixes the seed and multipliers".into(),
                ));
            }
            return prime_mode(&gaps, self.s);
        }
        match (&self.seed, &self.multipliers) {
            (Some(seed), Some(mult)) => generate_lemma38(&gaps, *seed, mult, self.s),
            _ => Err(Error::Domain(
                "generator spec needs \"seed\" and \"multipliers\" unless prime_mode".into(),
            )),
        }
    }
}
