use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::Serialize;

use super::{Column, QuotientDiagram};
use crate::indexset::IndexSet;
use crate::tuples::{Rational, TupleStructure};

/// Adjacent essential columns linked by rows labelled in `Σ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    columns: Vec<Rational>,
    labels: IndexSet,
}

impl Cell {
    /// The `t` values of the member columns, left to right.
    pub fn columns(&self) -> &[Rational] {
        &self.columns
    }

    /// `E = ⋃ K(C)` over the cell.
    pub fn labels(&self) -> IndexSet {
        self.labels
    }
}

/// The essential part of one quotient block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedBlock {
    block: usize,
    cells: Vec<Cell>,
    separators: Vec<Vec<Rational>>,
}

impl ReducedBlock {
    /// Position of the source block in the quotient diagram.
    pub fn block(&self) -> usize {
        self.block
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// `separators[i]`: the non-essential columns strictly between cell `i`
    /// and cell `i + 1`.
    pub fn separators(&self) -> &[Vec<Rational>] {
        &self.separators
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellDecomposition {
    blocks: Vec<ReducedBlock>,
}

impl CellDecomposition {
    pub fn blocks(&self) -> &[ReducedBlock] {
        &self.blocks
    }

    pub fn cell_count(&self) -> usize {
        self.blocks.iter().map(|b| b.cells.len()).sum()
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.blocks.iter().flat_map(|b| b.cells.iter())
    }
}

/// `|S(C)| ≥ 2`, with `S(C) = {σ_i : i ∈ K(C)}`.
pub fn is_essential(column: &Column, sigma: &[BigUint]) -> bool {
    column
        .k()
        .iter()
        .map(|i| &sigma[i])
        .collect::<BTreeSet<_>>()
        .len()
        >= 2
}

/// Removes non-essential columns from every quotient block and groups the
/// remaining ones into cells: consecutive essential columns `C < C′` share a
/// cell iff some row labelled by an index of `sigma_set` passes through both,
/// i.e. its label `r` satisfies `r ≤ t(C)` and `t(C′) ≤ r + s − 1`.
pub fn essential_and_cells(
    qd: &QuotientDiagram,
    st: &TupleStructure,
    sigma_set: IndexSet,
) -> CellDecomposition {
    let s = qd.s() as i64;
    let mut blocks = Vec::new();
    for (n, block) in qd.blocks().iter().enumerate() {
        let columns = block.columns();
        let essential: Vec<usize> = (0..columns.len())
            .filter(|&c| is_essential(&columns[c], st.sigma()))
            .collect();
        if essential.is_empty() {
            continue;
        }
        let sigma_rows: Vec<&Rational> = block
            .diagram()
            .labels()
            .iter()
            .filter(|l| st.owners(l).intersects(sigma_set))
            .collect();
        let linked = |a: &Column, b: &Column| {
            sigma_rows
                .iter()
                .any(|r| *r <= a.t() && b.t() <= &r.add_int(s - 1))
        };
        let mut groups: Vec<Vec<usize>> = vec![vec![essential[0]]];
        for w in essential.windows(2) {
            if linked(&columns[w[0]], &columns[w[1]]) {
                groups.last_mut().unwrap().push(w[1]);
            } else {
                groups.push(vec![w[1]]);
            }
        }
        let cells = groups
            .iter()
            .map(|g| Cell {
                columns: g.iter().map(|&c| columns[c].t().clone()).collect(),
                labels: g
                    .iter()
                    .fold(IndexSet::EMPTY, |acc, &c| acc.union(columns[c].k())),
            })
            .collect();
        let separators = groups
            .windows(2)
            .map(|w| {
                let (lo, hi) = (*w[0].last().unwrap(), w[1][0]);
                (lo + 1..hi).map(|c| columns[c].t().clone()).collect()
            })
            .collect();
        blocks.push(ReducedBlock {
            block: n,
            cells,
            separators,
        });
    }
    CellDecomposition { blocks }
}
