use super::CitationGraph;
use crate::{Error, Result};

/// Weak component labelling of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component label per node; 0 is the largest component.
    pub labels: Vec<u32>,
    /// Size of each component, indexed by label.
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

/// Labels weak components. Labels run from 0 by decreasing size; equal
/// sizes are ordered by their smallest member index.
pub fn weakly_connected_components(g: &CitationGraph) -> Components {
    let n = g.node_count();
    let mut raw = vec![u32::MAX; n];
    // discovered in increasing order of smallest member
    let mut raw_sizes: Vec<usize> = Vec::new();
    let mut stack = Vec::new();
    for root in 0..n as u32 {
        if raw[root as usize] != u32::MAX {
            continue;
        }
        let label = raw_sizes.len() as u32;
        raw[root as usize] = label;
        stack.push(root);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in g.out_neighbors(v).iter().chain(g.in_neighbors(v)) {
                if raw[w as usize] == u32::MAX {
                    raw[w as usize] = label;
                    stack.push(w);
                }
            }
        }
        raw_sizes.push(size);
    }
    let mut order: Vec<usize> = (0..raw_sizes.len()).collect();
    // stable sort keeps discovery order among equal sizes
    order.sort_by(|&a, &b| raw_sizes[b].cmp(&raw_sizes[a]));
    let mut relabel = vec![0u32; order.len()];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new as u32;
    }
    Components {
        labels: raw.iter().map(|&l| relabel[l as usize]).collect(),
        sizes: order.iter().map(|&old| raw_sizes[old]).collect(),
    }
}

/// Induced subgraph on the largest weak component.
pub fn largest_component(g: &CitationGraph) -> Result<CitationGraph> {
    if g.is_empty() {
        return Err(Error::Validation(
            "largest component of an empty graph".into(),
        ));
    }
    let comps = weakly_connected_components(g);
    let keep: Vec<bool> = comps.labels.iter().map(|&l| l == 0).collect();
    Ok(g.induced(&keep))
}
