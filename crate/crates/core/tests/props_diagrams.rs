//! Diagram invariants.

mod common;

use common::{all_tuples, dense_corpus};
use proptest::prelude::*;
use qrd::density::Pipeline;
use qrd::diagrams::{blocks_of, columns_of, r_partition, BlockDiagram, OverlapDiagram};
use qrd::{build_structure, Rational};

proptest! {
    #[test]
    fn blocks_are_disjoint_and_cover_small_gaps(
        gaps in prop::collection::vec(1u64..=12, 0..12),
        s in 2u64..=8,
    ) {
        let d = OverlapDiagram::new(gaps.clone(), s).unwrap();
        let blocks = blocks_of(&d);
        let mut inside = vec![false; gaps.len()];
        let mut last_end = 0;
        for &(l, r) in &blocks {
            prop_assert!(r > l, "block covers fewer than 2 rows");
            prop_assert!(l > last_end, "blocks overlap");
            last_end = r;
            for row in l..r {
                prop_assert!(gaps[row - 1] < s);
                inside[row - 1] = true;
            }
        }
        for (g, inside) in gaps.iter().zip(inside) {
            prop_assert_eq!(inside, *g < s);
        }
    }
}

fn check_partition(q: &[Rational], s: u32) {
    let parts = r_partition(q, s);
    let total: usize = parts.iter().map(Vec::len).sum();
    let mut distinct = q.to_vec();
    distinct.sort();
    distinct.dedup();
    assert_eq!(total, distinct.len());
    let s_rat = Rational::from_integer(s as i64);
    for part in &parts {
        for w in part.windows(2) {
            let gap = w[1].sub(&w[0]);
            assert!(gap.is_integer() && gap < s_rat, "{part:?}");
        }
        assert!(BlockDiagram::new(part.clone(), s).is_ok());
    }
}

#[test]
fn r_partition_parts_are_single_blocks() {
    for t in all_tuples() {
        let st = build_structure(&t.tuple()).unwrap();
        check_partition(&st.q_union(), st.s());
    }
}

#[test]
fn columns_have_constant_label_plus_offset() {
    for t in all_tuples() {
        let st = build_structure(&t.tuple()).unwrap();
        for part in r_partition(&st.q_union(), st.s()) {
            let block = BlockDiagram::new(part, st.s()).unwrap();
            for c in columns_of(&block, &st) {
                for (label, offset) in c.entries() {
                    assert_eq!(&label.add_int(*offset as i64), c.t(), "{t:?}");
                }
            }
        }
    }
}

#[test]
fn cells_are_disjoint_and_separated() {
    let mut disjoint_checked = 0;
    for t in dense_corpus() {
        let p = Pipeline::new(&t.tuple()).unwrap();
        let s = p.st.s() as i64;
        for rb in p.cells.blocks() {
            let cells = rb.cells();
            // Repeated σ values shrink Σ, so one index may then label two cells.
            if p.sigmas_distinct() {
                disjoint_checked += 1;
                for (i, x) in cells.iter().enumerate() {
                    for y in &cells[i + 1..] {
                        assert!(!x.labels().intersects(y.labels()), "{t:?}: {x:?} {y:?}");
                    }
                }
            }
            let block = &p.qd.blocks()[rb.block()];
            let sigma_rows: Vec<&Rational> = block
                .diagram()
                .labels()
                .iter()
                .filter(|l| p.st.owners(l).intersects(p.sigma_set))
                .collect();
            let through = |r: &Rational, t: &Rational| r <= t && t <= &r.add_int(s - 1);
            for cell in cells {
                for w in cell.columns().windows(2) {
                    assert!(sigma_rows
                        .iter()
                        .any(|r| through(r, &w[0]) && through(r, &w[1])));
                }
            }
            for w in cells.windows(2) {
                for r in &sigma_rows {
                    let left = w[0].columns().iter().any(|c| through(r, c));
                    let right = w[1].columns().iter().any(|c| through(r, c));
                    assert!(!(left && right), "{t:?}: row {r} spans two cells");
                }
            }
        }
    }
    assert!(disjoint_checked > 0);
}
