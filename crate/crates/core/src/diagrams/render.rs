use std::fmt::Write;

use super::{blocks_of, OverlapDiagram, QuotientDiagram};

/// One line per row: the right-aligned label, `" | "`, then two columns of
/// text per point position. Trailing whitespace is trimmed.
fn grid(labels: &[String], offsets: &[u64], s: u64) -> String {
    let width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (label, &off) in labels.iter().zip(offsets) {
        let line = format!(
            "{label:>width$} | {}{}",
            "  ".repeat(off as usize),
            ". ".repeat(s as usize)
        );
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Every quotient block as a dot grid with its rational row labels; an empty
/// diagram renders as the single line `(no blocks)`.
pub fn render_ascii(qd: &QuotientDiagram) -> String {
    if qd.is_empty() {
        return "(no blocks)\n".to_string();
    }
    let mut out = String::new();
    for (n, block) in qd.blocks().iter().enumerate() {
        if n > 0 {
            out.push('\n');
        }
        let d = block.diagram();
        let rows = d.labels().len();
        let _ = writeln!(
            out,
            "block {}: {rows} row{}, s = {}",
            n + 1,
            if rows == 1 { "" } else { "s" },
            d.s()
        );
        let labels: Vec<String> = d.labels().iter().map(ToString::to_string).collect();
        out.push_str(&grid(&labels, &d.offsets(), d.s() as u64));
    }
    out
}

/// A bare overlap diagram with rows numbered from 1, followed by its block
/// intervals.
pub fn render_overlap(diagram: &OverlapDiagram) -> String {
    let gaps: Vec<String> = diagram.gaps().iter().map(ToString::to_string).collect();
    let mut out = format!("gaps ({}), s = {}\n", gaps.join(","), diagram.s());
    let labels: Vec<String> = (1..=diagram.rows()).map(|r| r.to_string()).collect();
    out.push_str(&grid(&labels, &diagram.offsets(), diagram.s()));
    let blocks = blocks_of(diagram);
    if blocks.is_empty() {
        out.push_str("(no blocks)\n");
    } else {
        let list: Vec<String> = blocks.iter().map(|(l, r)| format!("[{l},{r}]")).collect();
        let _ = writeln!(out, "blocks: {}", list.join(" "));
    }
    out
}
