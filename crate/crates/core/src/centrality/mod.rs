//! Degree, betweenness, closeness and PageRank centrality with ranking and
//! CSV export.

mod adjacency;
mod betweenness;
mod closeness;
mod degree;
mod export;
mod pagerank;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

pub use betweenness::{betweenness_values, PathField};
pub use closeness::{closeness_values, ClosenessParams, ClosenessVariant, Direction};
pub use degree::degree;
pub use export::{
    export_centrality, metadata_path, write_centrality, write_metadata, CENTRALITY_HEADER,
};
pub use pagerank::{pagerank_run, Dangling, PageRankParams, PageRankRun};

use crate::graph::CitationGraph;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    InDegree,
    OutDegree,
    Betweenness,
    Closeness,
    PageRank,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::InDegree,
        Metric::OutDegree,
        Metric::Betweenness,
        Metric::Closeness,
        Metric::PageRank,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::InDegree => "in_degree",
            Metric::OutDegree => "out_degree",
            Metric::Betweenness => "betweenness",
            Metric::Closeness => "closeness",
            Metric::PageRank => "pagerank",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| Error::Parameter(format!("unknown metric {s:?}")))
    }
}

/// Parameters a centrality vector was computed with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricParams {
    Degree,
    Betweenness { undirected: bool },
    Closeness(ClosenessParams),
    PageRank(PageRankParams),
}

impl MetricParams {
    /// `key=value` pairs for metadata files.
    pub fn describe(&self) -> Vec<(&'static str, String)> {
        match *self {
            MetricParams::Degree => Vec::new(),
            MetricParams::Betweenness { undirected } => {
                vec![("undirected", undirected.to_string()), ("normalized", "false".into())]
            }
            MetricParams::Closeness(p) => vec![
                (
                    "variant",
                    match p.variant {
                        ClosenessVariant::Standard => "standard",
                        ClosenessVariant::PaperLiteral => "paper_literal",
                    }
                    .into(),
                ),
                (
                    "direction",
                    match p.direction {
                        Direction::Incoming => "incoming",
                        Direction::Outgoing => "outgoing",
                    }
                    .into(),
                ),
                ("undirected", p.undirected.to_string()),
            ],
            MetricParams::PageRank(p) => vec![
                ("damping", p.damping.to_string()),
                ("tol", p.tol.to_string()),
                ("max_iter", p.max_iter.to_string()),
                (
                    "dangling",
                    match p.dangling {
                        Dangling::Redistribute => "redistribute",
                        Dangling::Drop => "drop",
                    }
                    .into(),
                ),
            ],
        }
    }
}

/// One value per node, indexed like the graph it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector<T> {
    pub metric: Metric,
    pub values: Vec<T>,
    pub params: MetricParams,
    /// False only for an iterative method that hit its iteration cap.
    pub converged: bool,
    pub iterations: Option<usize>,
}

impl<T> CentralityVector<T> {
    pub(crate) fn exact(metric: Metric, values: Vec<T>, params: MetricParams) -> Self {
        Self {
            metric,
            values,
            params,
            converged: true,
            iterations: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn betweenness<F: PathField>(g: &CitationGraph, undirected: bool) -> CentralityVector<F> {
    CentralityVector::exact(
        Metric::Betweenness,
        betweenness_values(g, undirected),
        MetricParams::Betweenness { undirected },
    )
}

pub fn closeness<T: Scalar>(g: &CitationGraph, params: ClosenessParams) -> CentralityVector<T> {
    CentralityVector::exact(
        Metric::Closeness,
        closeness_values(g, params),
        MetricParams::Closeness(params),
    )
}

/// PageRank; hitting `max_iter` is reported through `converged`, not as an
/// error.
pub fn pagerank<T: Scalar>(g: &CitationGraph, params: PageRankParams) -> Result<CentralityVector<T>> {
    let run = pagerank_run(g, params)?;
    Ok(CentralityVector {
        metric: Metric::PageRank,
        values: run.values,
        params: MetricParams::PageRank(params),
        converged: run.converged,
        iterations: Some(run.iterations),
    })
}

/// Parameters for every metric, used where the metric is chosen at run time.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CentralitySettings {
    pub betweenness_undirected: bool,
    pub closeness: ClosenessParams,
    pub pagerank: PageRankParams,
}

pub fn compute<T: Scalar>(
    g: &CitationGraph,
    metric: Metric,
    settings: &CentralitySettings,
) -> Result<CentralityVector<T>> {
    Ok(match metric {
        Metric::InDegree => degree(g).0,
        Metric::OutDegree => degree(g).1,
        Metric::Betweenness => betweenness(g, settings.betweenness_undirected),
        Metric::Closeness => closeness(g, settings.closeness),
        Metric::PageRank => pagerank(g, settings.pagerank)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranked<T> {
    pub rank: usize,
    pub node_id: String,
    pub value: T,
}

/// Node indices sorted by descending value, ties by ascending string id.
pub fn rank_order<T: Scalar>(v: &CentralityVector<T>, g: &CitationGraph) -> Vec<u32> {
    assert_eq!(v.len(), g.node_count(), "centrality vector does not match graph");
    let mut order: Vec<u32> = (0..g.node_count() as u32).collect();
    order.sort_by(|&a, &b| {
        v.values[b as usize]
            .partial_cmp(&v.values[a as usize])
            .unwrap_or(Ordering::Equal)
            .then_with(|| g.node_id(a).cmp(g.node_id(b)))
    });
    order
}

/// 1-based rank of every node, indexed by node.
pub fn ranks<T: Scalar>(v: &CentralityVector<T>, g: &CitationGraph) -> Vec<usize> {
    let mut out = vec![0; g.node_count()];
    for (pos, &node) in rank_order(v, g).iter().enumerate() {
        out[node as usize] = pos + 1;
    }
    out
}

/// The first `k` nodes of the ranking (all nodes when `k` exceeds N).
pub fn top_k<T: Scalar>(v: &CentralityVector<T>, g: &CitationGraph, k: usize) -> Result<Vec<Ranked<T>>> {
    if k < 1 {
        return Err(Error::Parameter("top-k needs K >= 1".into()));
    }
    Ok(rank_order(v, g)
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, node)| Ranked {
            rank: i + 1,
            node_id: g.node_id(node).to_owned(),
            value: v.values[node as usize],
        })
        .collect())
}
