use std::collections::HashMap;
use std::ops::Range;

/// One citation as read from an edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationEdge {
    pub citing_id: String,
    pub cited_id: String,
    pub intent: Option<usize>,
    pub confidence: Option<f64>,
}

impl CitationEdge {
    pub fn new(citing: impl Into<String>, cited: impl Into<String>) -> Self {
        Self {
            citing_id: citing.into(),
            cited_id: cited.into(),
            intent: None,
            confidence: None,
        }
    }

    pub fn with_intent(mut self, intent: usize, confidence: Option<f64>) -> Self {
        self.intent = Some(intent);
        self.confidence = confidence;
        self
    }
}

/// Per-edge attributes carried by a [`CitationGraph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeAttr {
    pub intent: Option<usize>,
    pub confidence: Option<f64>,
    /// Number of input citations collapsed into this edge.
    pub multiplicity: u32,
}

impl EdgeAttr {
    /// Confidence ordering used when collapsing duplicates; a missing
    /// confidence ranks below any recorded one.
    fn rank(&self) -> f64 {
        self.confidence.unwrap_or(f64::NEG_INFINITY)
    }
}

/// Counters from [`build_graph`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub input_edges: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

/// Immutable directed citation graph in compressed adjacency form.
///
/// Edge ids index the out-adjacency arrays; within a node, out-edges are
/// sorted by target index. The in-adjacency mirrors every out-edge and
/// records which edge id it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationGraph {
    ids: Vec<String>,
    index: HashMap<String, u32>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    attrs: Vec<EdgeAttr>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    in_edges: Vec<u32>,
    stats: BuildStats,
}

impl CitationGraph {
    /// Builds from node ids (in index order) and deduplicated
    /// `(source, target, attr)` triples.
    pub(crate) fn from_parts(ids: Vec<String>, mut edges: Vec<(u32, u32, EdgeAttr)>, stats: BuildStats) -> Self {
        assert!(ids.len() <= u32::MAX as usize, "node count exceeds u32");
        let n = ids.len();
        edges.sort_by_key(|&(s, t, _)| (s, t));
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_counts = vec![0usize; n + 1];
        for &(s, t, _) in &edges {
            out_offsets[s as usize + 1] += 1;
            in_counts[t as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_counts[i + 1] += in_counts[i];
        }
        let in_offsets = in_counts;
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0u32; edges.len()];
        let mut in_edges = vec![0u32; edges.len()];
        // edges are sorted by source, so each in-list comes out sorted by source
        for (e, &(s, t, _)) in edges.iter().enumerate() {
            let slot = &mut cursor[t as usize];
            in_sources[*slot] = s;
            in_edges[*slot] = e as u32;
            *slot += 1;
        }
        let index = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as u32))
            .collect();
        Self {
            ids,
            index,
            out_offsets,
            out_targets: edges.iter().map(|&(_, t, _)| t).collect(),
            attrs: edges.into_iter().map(|(_, _, a)| a).collect(),
            in_offsets,
            in_sources,
            in_edges,
            stats,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn node_id(&self, v: u32) -> &str {
        &self.ids[v as usize]
    }

    pub fn node_index(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn out_edge_range(&self, v: u32) -> Range<usize> {
        self.out_offsets[v as usize]..self.out_offsets[v as usize + 1]
    }

    pub fn out_neighbors(&self, v: u32) -> &[u32] {
        &self.out_targets[self.out_edge_range(v)]
    }

    pub fn in_neighbors(&self, v: u32) -> &[u32] {
        &self.in_sources[self.in_offsets[v as usize]..self.in_offsets[v as usize + 1]]
    }

    /// Edge ids of the in-edges of `v`, parallel to [`Self::in_neighbors`].
    pub fn in_edge_ids(&self, v: u32) -> &[u32] {
        &self.in_edges[self.in_offsets[v as usize]..self.in_offsets[v as usize + 1]]
    }

    pub fn out_degree(&self, v: u32) -> usize {
        self.out_edge_range(v).len()
    }

    pub fn in_degree(&self, v: u32) -> usize {
        self.in_offsets[v as usize + 1] - self.in_offsets[v as usize]
    }

    pub fn edge_target(&self, e: usize) -> u32 {
        self.out_targets[e]
    }

    pub fn edge_attr(&self, e: usize) -> &EdgeAttr {
        &self.attrs[e]
    }

    /// `(source, target, attr)` for every edge in edge-id order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, &EdgeAttr)> + '_ {
        (0..self.node_count() as u32).flat_map(move |s| {
            self.out_edge_range(s)
                .map(move |e| (s, self.out_targets[e], &self.attrs[e]))
        })
    }

    /// Total citations before duplicate collapsing (self-loops excluded).
    pub fn raw_citation_count(&self) -> u64 {
        self.attrs.iter().map(|a| a.multiplicity as u64).sum()
    }

    pub fn build_stats(&self) -> BuildStats {
        self.stats
    }

    /// Multiplicity of the `(citing, cited)` edge, if present.
    pub fn multiplicity(&self, citing: &str, cited: &str) -> Option<u32> {
        let s = self.node_index(citing)?;
        let t = self.node_index(cited)?;
        let range = self.out_edge_range(s);
        let pos = self.out_targets[range.clone()].binary_search(&t).ok()?;
        Some(self.attrs[range.start + pos].multiplicity)
    }

    /// Induced subgraph on the nodes where `keep` is true, preserving
    /// relative node order and string ids.
    pub fn induced(&self, keep: &[bool]) -> CitationGraph {
        let mut remap = vec![u32::MAX; self.node_count()];
        let mut ids = Vec::new();
        for (v, id) in self.ids.iter().enumerate() {
            if keep[v] {
                remap[v] = ids.len() as u32;
                ids.push(id.clone());
            }
        }
        let edges = self
            .edges()
            .filter(|&(s, t, _)| keep[s as usize] && keep[t as usize])
            .map(|(s, t, a)| (remap[s as usize], remap[t as usize], *a))
            .collect();
        CitationGraph::from_parts(ids, edges, self.stats)
    }

    /// Structural equality by string ids: same node set, same edge set with
    /// the same attributes, regardless of index assignment.
    pub fn same_structure(&self, other: &CitationGraph) -> bool {
        if self.node_count() != other.node_count() || self.edge_count() != other.edge_count() {
            return false;
        }
        type Key<'a> = (Vec<&'a str>, Vec<(&'a str, &'a str, Option<usize>, Option<u64>, u32)>);
        fn key(g: &CitationGraph) -> Key<'_> {
            let mut nodes: Vec<&str> = g.ids.iter().map(String::as_str).collect();
            nodes.sort_unstable();
            let mut edges: Vec<(&str, &str, Option<usize>, Option<u64>, u32)> = g
                .edges()
                .map(|(s, t, a)| {
                    (
                        g.node_id(s),
                        g.node_id(t),
                        a.intent,
                        a.confidence.map(f64::to_bits),
                        a.multiplicity,
                    )
                })
                .collect();
            edges.sort_unstable();
            (nodes, edges)
        }
        key(self) == key(other)
    }
}

/// Builds a graph from citation edges.
///
/// Nodes are indexed by first appearance (citing before cited). Self-loops
/// are dropped; duplicate `(citing, cited)` pairs collapse into one edge that
/// keeps the highest-confidence intent (first seen on ties) and records the
/// multiplicity.
pub fn build_graph(edges: &[CitationEdge]) -> CitationGraph {
    build_graph_with_nodes(&[], edges)
}

/// Like [`build_graph`], but `nodes` are registered first, in order, so
/// isolated nodes survive a round trip through the node CSV.
pub fn build_graph_with_nodes(nodes: &[String], edges: &[CitationEdge]) -> CitationGraph {
    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut intern = |id: &str, ids: &mut Vec<String>| -> u32 {
        if let Some(&i) = index.get(id) {
            return i;
        }
        let i = ids.len() as u32;
        index.insert(id.to_owned(), i);
        ids.push(id.to_owned());
        i
    };
    for n in nodes {
        intern(n, &mut ids);
    }
    let mut stats = BuildStats {
        input_edges: edges.len(),
        ..BuildStats::default()
    };
    let mut merged: HashMap<(u32, u32), usize> = HashMap::new();
    let mut out: Vec<(u32, u32, EdgeAttr)> = Vec::new();
    for edge in edges {
        if edge.citing_id == edge.cited_id {
            stats.self_loops_dropped += 1;
            continue;
        }
        let s = intern(&edge.citing_id, &mut ids);
        let t = intern(&edge.cited_id, &mut ids);
        let attr = EdgeAttr {
            intent: edge.intent,
            confidence: edge.confidence,
            multiplicity: 1,
        };
        match merged.get(&(s, t)) {
            Some(&pos) => {
                stats.duplicates_collapsed += 1;
                let slot = &mut out[pos].2;
                let multiplicity = slot.multiplicity + 1;
                if attr.rank() > slot.rank() {
                    *slot = attr;
                }
                slot.multiplicity = multiplicity;
            }
            None => {
                merged.insert((s, t), out.len());
                out.push((s, t, attr));
            }
        }
    }
    CitationGraph::from_parts(ids, out, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: &str, b: &str) -> CitationEdge {
        CitationEdge::new(a, b)
    }

    #[test]
    fn empty_input_gives_empty_graph() {
        let g = build_graph(&[]);
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
    }

    #[test]
    fn duplicates_collapse_with_multiplicity() {
        let g = build_graph(&[e("a", "b"), e("a", "b"), e("b", "c")]);
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert_eq!(g.multiplicity("a", "b"), Some(2));
        assert_eq!(g.multiplicity("b", "c"), Some(1));
        assert_eq!(g.raw_citation_count(), 3);
        assert_eq!(g.node_ids(), ["a", "b", "c"]);
        assert_eq!(g.build_stats().duplicates_collapsed, 1);
    }

    #[test]
    fn conflicting_duplicates_keep_highest_confidence() {
        let g = build_graph(&[
            e("a", "b").with_intent(0, Some(0.6)),
            e("a", "b").with_intent(1, Some(0.9)),
            e("a", "b").with_intent(2, Some(0.9)),
            e("a", "b").with_intent(2, None),
        ]);
        let (_, _, attr) = g.edges().next().unwrap();
        assert_eq!(attr.intent, Some(1));
        assert_eq!(attr.multiplicity, 4);
    }

    #[test]
    fn self_loops_are_dropped_and_counted() {
        let g = build_graph(&[e("a", "a"), e("a", "b")]);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.build_stats().self_loops_dropped, 1);
        let only_loop = build_graph(&[e("x", "x")]);
        assert_eq!(only_loop.node_count(), 0);
    }

    #[test]
    fn adjacency_is_consistent() {
        let g = build_graph(&[e("a", "c"), e("b", "c"), e("a", "b"), e("c", "a")]);
        let n = g.node_count() as u32;
        let total_in: usize = (0..n).map(|v| g.in_degree(v)).sum();
        let total_out: usize = (0..n).map(|v| g.out_degree(v)).sum();
        assert_eq!(total_in, g.edge_count());
        assert_eq!(total_out, g.edge_count());
        for v in 0..n {
            for (&s, &eid) in g.in_neighbors(v).iter().zip(g.in_edge_ids(v)) {
                assert_eq!(g.edge_target(eid as usize), v);
                assert!(g.out_edge_range(s).contains(&(eid as usize)));
            }
        }
        assert_eq!(g.out_neighbors(0), &[1, 2]);
    }

    #[test]
    fn explicit_nodes_keep_isolated_vertices() {
        let g = build_graph_with_nodes(&["z".to_owned()], &[e("a", "b")]);
        assert_eq!(g.node_ids(), ["z", "a", "b"]);
        assert_eq!(g.in_degree(0) + g.out_degree(0), 0);
    }
}
