use super::{CentralityVector, Metric, MetricParams};
use crate::graph::CitationGraph;
use crate::Scalar;

/// In-degree (citations received) and out-degree (references made).
pub fn degree<T: Scalar>(g: &CitationGraph) -> (CentralityVector<T>, CentralityVector<T>) {
    let n = g.node_count() as u32;
    let inn = (0..n).map(|v| T::from_usize_lossy(g.in_degree(v))).collect();
    let out = (0..n).map(|v| T::from_usize_lossy(g.out_degree(v))).collect();
    (
        CentralityVector::exact(Metric::InDegree, inn, MetricParams::Degree),
        CentralityVector::exact(Metric::OutDegree, out, MetricParams::Degree),
    )
}
