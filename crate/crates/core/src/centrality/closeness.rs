use rayon::prelude::*;

use super::adjacency::{bfs, Adjacency, Walk};
use crate::graph::CitationGraph;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosenessVariant {
    /// Reachable-set closeness scaled by the reachable fraction.
    Standard,
    /// Sum of distances over reaching nodes divided by N.
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Distances from other nodes to `v` along citation edges.
    Incoming,
    /// Distances from `v` to other nodes.
    Outgoing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosenessParams {
    pub variant: ClosenessVariant,
    pub direction: Direction,
    pub undirected: bool,
}

impl Default for ClosenessParams {
    fn default() -> Self {
        Self {
            variant: ClosenessVariant::Standard,
            direction: Direction::Incoming,
            undirected: false,
        }
    }
}

pub fn closeness_values<T: Scalar>(g: &CitationGraph, params: ClosenessParams) -> Vec<T> {
    let walk = match (params.undirected, params.direction) {
        (true, _) => Walk::Undirected,
        // nodes reaching v are found by walking in-edges backwards from v
        (false, Direction::Incoming) => Walk::Reverse,
        (false, Direction::Outgoing) => Walk::Forward,
    };
    let adj = Adjacency::new(g, walk);
    let n = adj.len();
    (0..n)
        .into_par_iter()
        .map_init(
            || (vec![u32::MAX; n], Vec::with_capacity(n)),
            |(dist, order), v| {
                bfs(&adj, v, dist, order);
                let reached = order.len();
                let total: u64 = order.iter().map(|&u| dist[u as usize] as u64).sum();
                score(params.variant, reached, total, n)
            },
        )
        .collect()
}

/// `reached` counts `v` itself; `total` is the sum of distances.
fn score<T: Scalar>(variant: ClosenessVariant, reached: usize, total: u64, n: usize) -> T {
    match variant {
        ClosenessVariant::Standard => {
            if reached <= 1 {
                return T::zero();
            }
            let others = (reached - 1) as f64;
            T::lit((others / total as f64) * (others / (n - 1) as f64))
        }
        ClosenessVariant::PaperLiteral => T::lit(total as f64 / n as f64),
    }
}
