//! Overlap diagrams: gap sequences and their blocks, the partition `ℛ` of
//! `Q`, block diagrams `𝒟(R)` with their columns, the quotient diagram,
//! essential columns and cells.

mod cells;
mod render;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexset::IndexSet;
use crate::tuples::{KMaxFamily, Rational, TupleStructure};

pub use cells::{essential_and_cells, is_essential, Cell, CellDecomposition, ReducedBlock};
pub use render::{render_ascii, render_overlap};

/// `n + 1` rows of `s` points, row `i + 1` shifted right of row `i` by
/// `g(i) ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapDiagram {
    s: u64,
    gaps: Vec<u64>,
}

impl OverlapDiagram {
    pub fn new(gaps: Vec<u64>, s: u64) -> Result<Self> {
        if s < 2 {
            return Err(Error::Domain(format!("s must be at least 2, got {s}")));
        }
        if gaps.contains(&0) {
            return Err(Error::Domain("gaps must be positive".into()));
        }
        Ok(OverlapDiagram { s, gaps })
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn gaps(&self) -> &[u64] {
        &self.gaps
    }

    pub fn rows(&self) -> usize {
        self.gaps.len() + 1
    }

    /// Offset of each row from the first.
    pub fn offsets(&self) -> Vec<u64> {
        let mut acc = 0;
        std::iter::once(0)
            .chain(self.gaps.iter().map(|g| {
                acc += g;
                acc
            }))
            .collect()
    }
}

/// Blocks `[l_i, 1 + M_i]` (1-based rows): maximal runs of gaps `≤ s−1`,
/// extended by one row. Empty iff every gap is `≥ s`.
pub fn blocks_of(diagram: &OverlapDiagram) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &g) in diagram.gaps.iter().enumerate() {
        let row = i + 1;
        if g < diagram.s {
            start.get_or_insert(row);
        } else if let Some(l) = start.take() {
            out.push((l, row));
        }
    }
    if let Some(l) = start {
        out.push((l, diagram.rows()));
    }
    out
}

/// `ℛ`: split each `≈`-class of `Q` (equal fractional parts) wherever two
/// consecutive elements are `≥ s` apart. Parts are ascending and ordered by
/// their smallest element.
pub fn r_partition(q: &[Rational], s: u32) -> Vec<Vec<Rational>> {
    let mut classes: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
    for x in q {
        classes.entry(x.fract()).or_default().push(x.clone());
    }
    let s_rat = Rational::from_integer(s as i64);
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for (_, mut class) in classes {
        class.sort();
        class.dedup();
        let mut current: Vec<Rational> = Vec::new();
        for x in class {
            if let Some(last) = current.last() {
                if x.sub(last) >= s_rat {
                    out.push(std::mem::take(&mut current));
                }
            }
            current.push(x);
        }
        if !current.is_empty() {
            out.push(current);
        }
    }
    out.sort_by(|a, b| a[0].cmp(&b[0]));
    out
}

/// `𝒟(R)`: one row of `s` points per label, placed at the label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDiagram {
    labels: Vec<Rational>,
    s: u32,
}

impl BlockDiagram {
    /// Labels must be distinct, pairwise congruent modulo 1, with
    /// consecutive gaps at most `s − 1`.
    pub fn new(mut labels: Vec<Rational>, s: u32) -> Result<Self> {
        labels.sort();
        labels.dedup();
        if labels.is_empty() {
            return Err(Error::Domain(
                "a block diagram needs at least one row".into(),
            ));
        }
        for w in labels.windows(2) {
            let gap = w[1].sub(&w[0]);
            match gap.to_i64() {
                Some(g) if g < s as i64 => {}
                _ => {
                    return Err(Error::Domain(format!(
                        "rows {} and {} do not overlap at s = {s}",
                        w[0], w[1]
                    )))
                }
            }
        }
        Ok(BlockDiagram { labels, s })
    }

    pub fn labels(&self) -> &[Rational] {
        &self.labels
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// `d_i = r_{i+1} − r_i`.
    pub fn gaps(&self) -> Vec<u64> {
        self.labels
            .windows(2)
            .map(|w| w[1].sub(&w[0]).to_i64().expect("integer gap") as u64)
            .collect()
    }

    /// Offset of each row from the first label.
    pub fn offsets(&self) -> Vec<u64> {
        self.labels
            .iter()
            .map(|l| l.sub(&self.labels[0]).to_i64().expect("integer offset") as u64)
            .collect()
    }
}

/// A vertical fiber of `𝒟(R)`: the points `(label, offset)` with
/// `label + offset = t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    t: Rational,
    #[serde(skip)]
    entries: Vec<(Rational, u32)>,
    #[serde(rename = "K")]
    k: IndexSet,
}

impl Column {
    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn entries(&self) -> &[(Rational, u32)] {
        &self.entries
    }

    /// `θ(C)`: the row labels meeting the column.
    pub fn theta(&self) -> Vec<Rational> {
        self.entries.iter().map(|(l, _)| l.clone()).collect()
    }

    /// `K(C) = {i : Q_i ∩ θ(C) ≠ ∅}`.
    pub fn k(&self) -> IndexSet {
        self.k
    }
}

pub fn columns_of(block: &BlockDiagram, st: &TupleStructure) -> Vec<Column> {
    let offsets = block.offsets();
    let s = block.s as u64;
    let span = offsets.last().copied().unwrap_or(0) + s - 1;
    let first = &block.labels[0];
    let mut out = Vec::with_capacity(span as usize + 1);
    let mut lo = 0usize;
    for x in 0..=span {
        while lo < offsets.len() && offsets[lo] + s - 1 < x {
            lo += 1;
        }
        let mut entries = Vec::new();
        let mut k = IndexSet::EMPTY;
        for (label, &off) in block.labels[lo..].iter().zip(&offsets[lo..]) {
            if off > x {
                break;
            }
            entries.push((label.clone(), (x - off) as u32));
            k = k.union(st.owners(label));
        }
        if entries.is_empty() {
            continue;
        }
        out.push(Column {
            t: first.add_int(x as i64),
            entries,
            k,
        });
    }
    out
}

/// `𝒦_max` as `{K(C) : C ∈ 𝒞}`, the columns of every `𝒟(R)`, `R ∈ ℛ`.
pub fn kmax_via_columns(st: &TupleStructure) -> KMaxFamily {
    let mut members = Vec::new();
    for r in r_partition(&st.q_union(), st.s()) {
        let block = BlockDiagram::new(r, st.s()).expect("parts of ℛ overlap");
        members.extend(columns_of(&block, st).iter().map(Column::k));
    }
    KMaxFamily::from_members(members)
}

/// One `𝒟(R)` of the quotient diagram with its columns and `D_n = ⋃ K(C)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientBlock {
    #[serde(flatten)]
    diagram: BlockDiagram,
    columns: Vec<Column>,
    #[serde(skip)]
    indices: IndexSet,
}

impl QuotientBlock {
    pub fn diagram(&self) -> &BlockDiagram {
        &self.diagram
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// `D_n`.
    pub fn indices(&self) -> IndexSet {
        self.indices
    }
}

/// The `𝒟(R)` having a column with `|K(C)| ≥ 2`, ordered by smallest label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientDiagram {
    s: u32,
    blocks: Vec<QuotientBlock>,
}

impl QuotientDiagram {
    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn blocks(&self) -> &[QuotientBlock] {
        &self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `{"blocks":[{"labels":[…],"columns":[{"t":"p/q","K":[…]}]}]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

pub fn quotient_diagram(st: &TupleStructure) -> QuotientDiagram {
    let mut blocks = Vec::new();
    for r in r_partition(&st.q_union(), st.s()) {
        let diagram = BlockDiagram::new(r, st.s()).expect("parts of ℛ overlap");
        let columns = columns_of(&diagram, st);
        if columns.iter().any(|c| c.k.len() >= 2) {
            let indices = columns
                .iter()
                .fold(IndexSet::EMPTY, |acc, c| acc.union(c.k));
            blocks.push(QuotientBlock {
                diagram,
                columns,
                indices,
            });
        }
    }
    QuotientDiagram { s: st.s(), blocks }
}
