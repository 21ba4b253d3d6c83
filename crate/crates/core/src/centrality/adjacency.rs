use crate::graph::CitationGraph;

/// Which edges a traversal follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Walk {
    Forward,
    Reverse,
    Undirected,
}

/// Plain offset-array adjacency built from a graph for one walk direction.
pub(crate) struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    pub(crate) fn new(g: &CitationGraph, walk: Walk) -> Self {
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(g.edge_count());
        offsets.push(0);
        for v in 0..n as u32 {
            match walk {
                Walk::Forward => targets.extend_from_slice(g.out_neighbors(v)),
                Walk::Reverse => targets.extend_from_slice(g.in_neighbors(v)),
                Walk::Undirected => {
                    // both lists are sorted; merge without duplicates
                    let (a, b) = (g.out_neighbors(v), g.in_neighbors(v));
                    let (mut i, mut j) = (0, 0);
                    while i < a.len() || j < b.len() {
                        let next = match (a.get(i), b.get(j)) {
                            (Some(&x), Some(&y)) if x == y => {
                                i += 1;
                                j += 1;
                                x
                            }
                            (Some(&x), Some(&y)) if x < y => {
                                i += 1;
                                x
                            }
                            (Some(&x), None) => {
                                i += 1;
                                x
                            }
                            (_, Some(&y)) => {
                                j += 1;
                                y
                            }
                            (None, None) => unreachable!(),
                        };
                        targets.push(next);
                    }
                }
            }
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub(crate) fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub(crate) fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Breadth-first distances from `src`; unreachable nodes stay at `u32::MAX`.
/// `order` receives the nodes in visit order.
pub(crate) fn bfs(adj: &Adjacency, src: usize, dist: &mut [u32], order: &mut Vec<u32>) {
    dist.fill(u32::MAX);
    order.clear();
    dist[src] = 0;
    order.push(src as u32);
    let mut head = 0;
    while head < order.len() {
        let v = order[head] as usize;
        head += 1;
        for &w in adj.neighbors(v) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dist[v] + 1;
                order.push(w);
            }
        }
    }
}
