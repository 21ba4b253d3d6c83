//! Intent filtering, structural impact reports and rank shifts.

mod impact;
mod rank_shift;

use std::collections::BTreeSet;

pub use impact::{impact_report, render_impact_table, write_impact_csv, GraphCounts, ImpactReport, IMPACT_HEADER};
pub use rank_shift::{
    export_bump_data, rank_shift, read_bump_data, read_bump_file, write_bump_data, RankShiftReport,
    RankShiftRow, BUMP_HEADER, DEFAULT_HORIZON,
};

use crate::graph::CitationGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    pub removed_intents: BTreeSet<usize>,
    /// When set, only edges at or above this confidence are removed. Edges
    /// without a confidence count as certain.
    pub min_confidence: Option<f64>,
    /// Remove nodes whose every edge was filtered out.
    pub drop_isolated_nodes: bool,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            removed_intents: BTreeSet::new(),
            min_confidence: None,
            drop_isolated_nodes: true,
        }
    }
}

impl FilterSpec {
    pub fn removing(intents: impl IntoIterator<Item = usize>) -> Self {
        Self {
            removed_intents: intents.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if let Some(&bad) = self.removed_intents.iter().find(|&&i| i >= k) {
            return Err(Error::Parameter(format!("removed intent {bad} outside 0..{k}")));
        }
        if let Some(c) = self.min_confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::Parameter(format!("min_confidence {c} outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// Removes edges whose intent is in `removed_intents` (subject to the
/// confidence threshold). With `drop_isolated_nodes`, nodes left without any
/// edge by the removal are dropped; nodes that were already isolated stay.
pub fn filter_graph(g: &CitationGraph, spec: &FilterSpec) -> Result<CitationGraph> {
    if spec.removed_intents.is_empty() {
        return Ok(g.clone());
    }
    let mut kept = Vec::with_capacity(g.edge_count());
    for (s, t, attr) in g.edges() {
        let intent = attr.intent.ok_or_else(|| {
            Error::Validation(format!(
                "edge {} -> {} has no intent; cannot filter by intent",
                g.node_id(s),
                g.node_id(t)
            ))
        })?;
        let confident = match spec.min_confidence {
            Some(min) => attr.confidence.unwrap_or(1.0) >= min,
            None => true,
        };
        if !(spec.removed_intents.contains(&intent) && confident) {
            kept.push((s, t, *attr));
        }
    }
    let n = g.node_count();
    let keep_node: Vec<bool> = if spec.drop_isolated_nodes {
        let mut touched = vec![false; n];
        for &(s, t, _) in &kept {
            touched[s as usize] = true;
            touched[t as usize] = true;
        }
        (0..n as u32)
            .map(|v| touched[v as usize] || g.in_degree(v) + g.out_degree(v) == 0)
            .collect()
    } else {
        vec![true; n]
    };
    let mut remap = vec![u32::MAX; n];
    let mut ids = Vec::new();
    for v in 0..n {
        if keep_node[v] {
            remap[v] = ids.len() as u32;
            ids.push(g.node_id(v as u32).to_owned());
        }
    }
    let edges = kept
        .into_iter()
        .map(|(s, t, a)| (remap[s as usize], remap[t as usize], a))
        .collect();
    Ok(CitationGraph::from_parts(ids, edges, g.build_stats()))
}
