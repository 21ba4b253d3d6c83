use std::io::Write;

use crate::graph::{weakly_connected_components, CitationGraph};
use crate::scalar::fmt_float;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphCounts {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
}

impl GraphCounts {
    pub fn of(g: &CitationGraph) -> Self {
        Self {
            nodes: g.node_count(),
            edges: g.edge_count(),
            components: weakly_connected_components(g).count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImpactReport {
    pub before: GraphCounts,
    pub after: GraphCounts,
}

fn delta(before: usize, after: usize) -> f64 {
    if before == 0 {
        return 0.0;
    }
    (after as f64 - before as f64) / before as f64
}

impl ImpactReport {
    pub fn node_delta(&self) -> f64 {
        delta(self.before.nodes, self.after.nodes)
    }

    pub fn edge_delta(&self) -> f64 {
        delta(self.before.edges, self.after.edges)
    }

    pub fn component_delta(&self) -> f64 {
        delta(self.before.components, self.after.components)
    }
}

pub fn impact_report(before: &CitationGraph, after: &CitationGraph) -> ImpactReport {
    ImpactReport {
        before: GraphCounts::of(before),
        after: GraphCounts::of(after),
    }
}

fn grouped(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

fn cell(after: usize, d: f64) -> String {
    format!("{} ({:+.1}%)", grouped(after), d * 100.0)
}

/// Aligned text table: one row per count, the unfiltered baseline first and
/// one column per named filter.
pub fn render_impact_table(columns: &[(String, ImpactReport)]) -> String {
    let Some((_, first)) = columns.first() else {
        return String::new();
    };
    let mut header = vec!["Metric".to_owned(), "Full Network".to_owned()];
    header.extend(columns.iter().map(|(name, _)| name.clone()));
    type Pick = fn(&ImpactReport) -> (usize, f64);
    let picks: [(&str, usize, Pick); 3] = [
        ("Nodes", first.before.nodes, |r| (r.after.nodes, r.node_delta())),
        ("Edges", first.before.edges, |r| (r.after.edges, r.edge_delta())),
        ("Components", first.before.components, |r| (r.after.components, r.component_delta())),
    ];
    let rows: Vec<Vec<String>> = picks
        .iter()
        .map(|(label, base, pick)| {
            let mut row = vec![label.to_string(), grouped(*base)];
            row.extend(columns.iter().map(|(_, r)| {
                let (after, d) = pick(r);
                cell(after, d)
            }));
            row
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            std::iter::once(&header)
                .chain(&rows)
                .map(|r| r[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |r: &[String]| {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (s, &w))| if i == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
            .collect();
        cells.join("  ").trim_end().to_owned() + "\n"
    };
    let mut out = line(&header);
    for r in &rows {
        out += &line(r);
    }
    out
}

pub const IMPACT_HEADER: [&str; 10] = [
    "filter",
    "nodes_before",
    "nodes_after",
    "nodes_delta",
    "edges_before",
    "edges_after",
    "edges_delta",
    "components_before",
    "components_after",
    "components_delta",
];

/// One CSV row per named filter; deltas are raw fractions.
pub fn write_impact_csv<W: Write>(columns: &[(String, ImpactReport)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Format(format!("impact csv: {e}"));
    w.write_record(IMPACT_HEADER).map_err(wrap)?;
    for (name, r) in columns {
        w.write_record([
            name.clone(),
            r.before.nodes.to_string(),
            r.after.nodes.to_string(),
            fmt_float(r.node_delta()),
            r.before.edges.to_string(),
            r.after.edges.to_string(),
            fmt_float(r.edge_delta()),
            r.before.components.to_string(),
            r.after.components.to_string(),
            fmt_float(r.component_delta()),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(format!("impact csv: {e}")))
}
