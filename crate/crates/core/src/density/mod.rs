//! The density engine: `Λ′(𝒦)`, `Σ`, the relations `~` and `≃`, the
//! distinct-and-independent condition, the closed-form and general
//! formulas, and the exact density of `Π₊` from the signature rank.

mod dyadic;
mod formulas;
mod lambda;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::diagrams::{kmax_via_columns, quotient_diagram, CellDecomposition, QuotientDiagram};
use crate::error::{Error, Result};
use crate::indexset::IndexSet;
use crate::tuples::{build_structure, kmax_direct, KMaxFamily, StandardTuple, TupleStructure};

pub use dyadic::{Dyadic, MAX_LOG2_DEN};
pub use formulas::{
    eq312_density, general_density, general_parameters, lambda_family, lemma32_density,
    lemma32_density_prime_sets, p_empty_closed_twice, p_empty_count, signature_density,
    theorem37_density, EpsilonM1, FormulaInputs, GeneralParameters, PartitionFormula, MAX_FAMILY,
    MAX_LAMBDA_PRIME, MAX_PARTITION_FAMILY, MAX_SIGMA,
};
pub use lambda::{
    cells, check_condition_39, check_proposition_35, lambda_prime, phi, sigma_set,
    sigma_set_by_columns, simeq_classes, tilde_classes, Condition39, LambdaPrime, LambdaRep,
    MAX_K_SIZE,
};

/// Which closed form produced `formula_density`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaPath {
    AllSquares,
    MuZero,
    #[serde(rename = "theorem-3.7")]
    Theorem37,
    General,
}

impl std::fmt::Display for FormulaPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FormulaPath::AllSquares => "all-squares",
            FormulaPath::MuZero => "mu-zero",
            FormulaPath::Theorem37 => "theorem-3.7",
            FormulaPath::General => "general",
        })
    }
}

/// Every intermediate object of the analysis.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub tuple: StandardTuple,
    pub st: TupleStructure,
    pub kmax: KMaxFamily,
    pub kmax_columns: KMaxFamily,
    pub qd: QuotientDiagram,
    pub lp: LambdaPrime,
    pub sigma_set: IndexSet,
    pub sigma_set_columns: IndexSet,
    pub tilde: Vec<IndexSet>,
    pub simeq: Vec<Vec<usize>>,
    pub cond39: Condition39,
    pub cells: CellDecomposition,
}

impl Pipeline {
    pub fn new(tuple: &StandardTuple) -> Result<Self> {
        let st = build_structure(tuple)?;
        let kmax = kmax_direct(&st);
        let kmax_columns = kmax_via_columns(&st);
        let qd = quotient_diagram(&st);
        let lp = lambda_prime(&kmax, &st)?;
        let sigma = sigma_set(&lp);
        let sigma_set_columns = sigma_set_by_columns(&qd, &st);
        let tilde = tilde_classes(sigma, &qd, &st);
        let simeq = simeq_classes(&lp);
        let cond39 = check_condition_39(sigma, &st)?;
        let cells = cells(&qd, &st, sigma);
        Ok(Pipeline {
            tuple: tuple.clone(),
            st,
            kmax,
            kmax_columns,
            qd,
            lp,
            sigma_set: sigma,
            sigma_set_columns,
            tilde,
            simeq,
            cond39,
            cells,
        })
    }

    pub fn inputs(&self) -> FormulaInputs<'_> {
        FormulaInputs {
            st: &self.st,
            lp: &self.lp,
            sigma_set: self.sigma_set,
            tilde: &self.tilde,
            simeq: &self.simeq,
        }
    }

    pub fn mu(&self) -> usize {
        self.tilde.len()
    }

    /// True iff all `σ_i` are pairwise distinct on `[1, k]`.
    pub fn sigmas_distinct(&self) -> bool {
        let s = self.st.sigma();
        (0..s.len()).all(|i| (i + 1..s.len()).all(|j| s[i] != s[j]))
    }

    /// The closed form selected by the dispatch rule, with the general
    /// parameters when that path was taken. `None` when an enumeration cap
    /// was hit.
    pub fn formula(&self) -> Result<(FormulaPath, Option<Dyadic>, Option<GeneralParameters>)> {
        if self.st.all_sigma_one() {
            return Ok((FormulaPath::AllSquares, Some(Dyadic::ONE), None));
        }
        if self.mu() == 0 {
            return Ok((FormulaPath::MuZero, Some(Dyadic::ONE), None));
        }
        let inp = self.inputs();
        if self.cond39.holds() {
            let density = theorem37_density(&inp, &self.cond39)?;
            return Ok((FormulaPath::Theorem37, Some(density), None));
        }
        match general_parameters(&inp) {
            Ok(g) => Ok((FormulaPath::General, Some(general_density(&g)?), Some(g))),
            Err(Error::SizeLimit { .. }) => Ok((FormulaPath::General, None, None)),
            Err(e) => Err(e),
        }
    }
}

/// The serializable result of [`analyze`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityAnalysis {
    pub k: usize,
    #[serde(with = "crate::bigjson::vec")]
    pub sigma: Vec<BigUint>,
    pub kmax: KMaxFamily,
    pub lambda_prime: LambdaPrime,
    pub sigma_set: IndexSet,
    pub sigma_set_columns: IndexSet,
    pub sigma_sets_agree: bool,
    pub sigma_count: usize,
    pub classes: Vec<IndexSet>,
    pub mu: usize,
    /// Each `≃`-class as its list of representatives `I`.
    pub lambda_classes: Vec<Vec<IndexSet>>,
    pub m1: Vec<IndexSet>,
    /// 1-based label of `i₀`.
    pub i0: Option<usize>,
    pub varpi0: Option<IndexSet>,
    pub phi_varpi0: Option<Vec<IndexSet>>,
    pub d: usize,
    pub epsilon: Option<u8>,
    pub condition39: bool,
    pub alpha: Option<u64>,
    pub beta: Option<u64>,
    pub omega: Option<u64>,
    pub signature_rank: usize,
    pub formula_path: FormulaPath,
    pub formula_density: Option<Dyadic>,
    pub formula_matches: Option<bool>,
    pub density_plus: Dyadic,
    pub density_minus: Dyadic,
    pub blocks: usize,
    pub cells: usize,
}

impl DensityAnalysis {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("analysis serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("analysis JSON: {e}")))
    }
}

/// Runs the full pipeline. `density_plus` is always the signature-rank
/// density; the closed form is reported beside it.
pub fn analyze(t: &StandardTuple) -> Result<DensityAnalysis> {
    analyze_pipeline(&Pipeline::new(t)?)
}

pub fn analyze_pipeline(p: &Pipeline) -> Result<DensityAnalysis> {
    let inp = p.inputs();
    let reps = p.lp.reps();
    let positions = |xs: &[usize]| -> Vec<IndexSet> { xs.iter().map(|&x| reps[x].i).collect() };
    let (density_plus, signature_rank) = signature_density(&p.kmax, &p.st)?;
    let (formula_path, formula_density, general) = p.formula()?;
    let m1 = inp.m1();
    let units = inp.unit_indices();
    let i0 = (!m1.is_empty() && units.len() == 1).then(|| units[0]);
    let varpi0 = i0.and_then(|i| p.tilde.iter().copied().find(|c| c.contains(i)));
    let phi_varpi0 = varpi0.map(|w| positions(&phi(&p.lp, w)));
    let epsilon = if p.cond39.holds() {
        Some(inp.epsilon_and_m1()?.epsilon)
    } else {
        general.as_ref().and_then(|g| g.epsilon)
    };
    Ok(DensityAnalysis {
        k: p.st.k(),
        sigma: p.st.sigma().to_vec(),
        kmax: p.kmax.clone(),
        lambda_prime: p.lp.clone(),
        sigma_set: p.sigma_set,
        sigma_set_columns: p.sigma_set_columns,
        sigma_sets_agree: p.sigma_set == p.sigma_set_columns,
        sigma_count: p.sigma_set.len(),
        classes: p.tilde.clone(),
        mu: p.mu(),
        lambda_classes: p.simeq.iter().map(|c| positions(c)).collect(),
        m1: positions(&m1),
        i0: i0.map(|i| i + 1),
        varpi0,
        phi_varpi0,
        d: inp.d()?,
        epsilon,
        condition39: p.cond39.holds(),
        alpha: general.as_ref().map(|g| g.alpha),
        beta: general.as_ref().and_then(|g| g.beta),
        omega: general.as_ref().and_then(|g| g.omega),
        signature_rank,
        formula_path,
        formula_density,
        formula_matches: formula_density.map(|f| f == density_plus),
        density_plus,
        density_minus: density_plus.one_minus()?,
        blocks: p.qd.blocks().len(),
        cells: p.cells.cell_count(),
    })
}

/// Outcome of one internal cross-check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    /// `None` when the check does not apply to this input.
    pub passed: Option<bool>,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: Option<bool>, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    pub fn failed(&self) -> bool {
        self.passed == Some(false)
    }
}

/// Runs every internal cross-check; a failure is reported, not raised.
pub fn run_checks(p: &Pipeline) -> Result<Vec<CheckOutcome>> {
    let inp = p.inputs();
    let mut out = Vec::new();

    out.push(CheckOutcome::new(
        "kmax-two-paths",
        Some(p.kmax == p.kmax_columns),
        format!(
            "direct {} patterns, by columns {}",
            p.kmax.len(),
            p.kmax_columns.len()
        ),
    ));

    let bij = check_proposition_35(&p.lp, &p.tilde, &p.simeq);
    out.push(CheckOutcome::new(
        "class-bijection",
        Some(bij.is_ok()),
        match bij {
            Ok(()) => format!("{} classes on both sides", p.tilde.len()),
            Err(e) => e,
        },
    ));

    let agree = p.sigma_set == p.sigma_set_columns;
    out.push(CheckOutcome::new(
        "sigma-column-formula",
        p.sigmas_distinct().then_some(agree),
        format!(
            "from Z sets {}, from essential columns {}{}",
            p.sigma_set,
            p.sigma_set_columns,
            if p.sigmas_distinct() {
                ""
            } else {
                " (square-free parts repeat; informational)"
            }
        ),
    ));

    let c = p.cond39;
    out.push(CheckOutcome::new(
        "independence-two-ways",
        c.independent_by_symdiff.map(|s| s == c.independent),
        format!(
            "rank test {}, symmetric-difference test {:?}",
            c.independent, c.independent_by_symdiff
        ),
    ));

    if c.holds() {
        let closed = theorem37_density(&inp, &c)?;
        let partition = eq312_density(&inp, &c)?;
        out.push(CheckOutcome::new(
            "closed-form-vs-partition-formula",
            Some(closed == partition.density),
            format!(
                "closed form {closed}, partition formula {}",
                partition.density
            ),
        ));
        if !inp.m0().is_empty() {
            let brute = p_empty_count(&inp)? as i128;
            let closed_twice = p_empty_closed_twice(&inp)?;
            out.push(CheckOutcome::new(
                "partition-count-closed-form",
                Some(2 * brute == closed_twice),
                format!("enumerated {brute}, closed form {closed_twice}/2"),
            ));
        }
        match general_parameters(&inp) {
            Ok(g) => {
                let gd = general_density(&g)?;
                let reduces = g.alpha == 0
                    && g.beta.unwrap_or(0) == 0
                    && g.omega.is_none_or(|w| w == 1)
                    && gd == closed;
                out.push(CheckOutcome::new(
                    "general-reduces-to-closed-form",
                    Some(reduces),
                    format!(
                        "alpha {}, beta {:?}, omega {:?}, general {gd}, closed {closed}",
                        g.alpha, g.beta, g.omega
                    ),
                ));
            }
            Err(Error::SizeLimit { .. }) => out.push(CheckOutcome::new(
                "general-reduces-to-closed-form",
                None,
                "enumeration cap exceeded",
            )),
            Err(e) => return Err(e),
        }
    }

    let (sig, _) = signature_density(&p.kmax, &p.st)?;
    if p.lp.len() <= MAX_FAMILY {
        let family = lemma32_density_prime_sets(&lambda_family(&inp));
        match family {
            Ok(f) => out.push(CheckOutcome::new(
                "family-formula-vs-signature-rank",
                Some(f == sig),
                format!("family formula {f}, signature rank {sig}"),
            )),
            Err(Error::SizeLimit { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    out.push(CheckOutcome::new(
        "density-in-unit-interval",
        Some(sig.in_unit_interval() && sig.add(sig.one_minus()?)? == Dyadic::ONE),
        format!("density {sig}"),
    ));
    Ok(out)
}
