use num_traits::{Num, NumAssign};
use rayon::prelude::*;

use super::adjacency::{Adjacency, Walk};
use crate::graph::CitationGraph;

/// Number type that betweenness accumulates in; any field works, including
/// exact rationals.
pub trait PathField: Num + NumAssign + Clone + Send + Sync {}

impl<T: Num + NumAssign + Clone + Send + Sync> PathField for T {}

/// Sources handled per work unit. Partial sums are merged in block order, so
/// floating-point results do not depend on the thread count.
const SOURCE_BLOCK: usize = 32;

/// Unnormalized betweenness over ordered pairs `(s, t)` by Brandes'
/// accumulation. With `undirected`, edges are walked both ways.
pub fn betweenness_values<F: PathField>(g: &CitationGraph, undirected: bool) -> Vec<F> {
    let walk = if undirected { Walk::Undirected } else { Walk::Forward };
    let adj = Adjacency::new(g, walk);
    let n = adj.len();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<F>> = sources
        .par_chunks(SOURCE_BLOCK)
        .map(|block| {
            let mut acc = vec![F::zero(); n];
            let mut scratch = Scratch::new(n);
            for &s in block {
                scratch.accumulate(&adj, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![F::zero(); n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

struct Scratch<F> {
    dist: Vec<u32>,
    sigma: Vec<F>,
    delta: Vec<F>,
    order: Vec<u32>,
}

impl<F: PathField> Scratch<F> {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![u32::MAX; n],
            sigma: vec![F::zero(); n],
            delta: vec![F::zero(); n],
            order: Vec::with_capacity(n),
        }
    }

    fn accumulate(&mut self, adj: &Adjacency, s: usize, acc: &mut [F]) {
        // only entries touched by the previous source need resetting
        for &v in &self.order {
            let v = v as usize;
            self.dist[v] = u32::MAX;
            self.sigma[v] = F::zero();
            self.delta[v] = F::zero();
        }
        self.order.clear();
        self.dist[s] = 0;
        self.sigma[s] = F::one();
        self.order.push(s as u32);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head] as usize;
            head += 1;
            for &w in adj.neighbors(v) {
                let w = w as usize;
                if self.dist[w] == u32::MAX {
                    self.dist[w] = self.dist[v] + 1;
                    self.order.push(w as u32);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    let sv = self.sigma[v].clone();
                    self.sigma[w] += sv;
                }
            }
        }
        for &v in self.order.iter().rev() {
            let v = v as usize;
            let mut dv = F::zero();
            for &w in adj.neighbors(v) {
                let w = w as usize;
                if self.dist[w] == self.dist[v] + 1 {
                    dv += self.sigma[v].clone() / self.sigma[w].clone()
                        * (F::one() + self.delta[w].clone());
                }
            }
            self.delta[v] = dv;
            if v != s {
                acc[v] += self.delta[v].clone();
            }
        }
    }
}
