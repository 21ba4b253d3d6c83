use rayon::prelude::*;

use crate::graph::CitationGraph;
use crate::scalar::pairwise_sum;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dangling {
    /// Spread the rank of nodes without out-edges evenly over all nodes.
    Redistribute,
    /// Let it leak, as the unnormalized update is written.
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub dangling: Dangling,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 100,
            dangling: Dangling::Redistribute,
        }
    }
}

impl PageRankParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::Parameter(format!("damping {} not in (0,1)", self.damping)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Parameter(format!("tolerance {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankRun<T> {
    pub values: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    /// L1 change of the last iteration.
    pub residual: f64,
}

/// Power iteration of `PR(A) = (1-d) + d * sum PR(T)/C(T)` from `PR = 1`,
/// stopping once the L1 change drops below `tol`.
pub fn pagerank_run<T: Scalar>(g: &CitationGraph, params: PageRankParams) -> Result<PageRankRun<T>> {
    params.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Validation("pagerank of an empty graph".into()));
    }
    let d = T::lit(params.damping);
    let base = T::one() - d;
    let out_deg: Vec<T> = (0..n as u32).map(|v| T::from_usize_lossy(g.out_degree(v))).collect();
    let dangling: Vec<usize> = (0..n).filter(|&v| g.out_degree(v as u32) == 0).collect();
    let mut pr = vec![T::one(); n];
    let mut next = vec![T::zero(); n];
    let mut residual = f64::INFINITY;
    for iter in 1..=params.max_iter {
        let leak = match params.dangling {
            Dangling::Redistribute => {
                let mass: Vec<T> = dangling.iter().map(|&v| pr[v]).collect();
                d * pairwise_sum(&mass) / T::from_usize_lossy(n)
            }
            Dangling::Drop => T::zero(),
        };
        next.par_iter_mut().enumerate().for_each(|(v, slot)| {
            let mut sum = T::zero();
            for &u in g.in_neighbors(v as u32) {
                sum += pr[u as usize] / out_deg[u as usize];
            }
            *slot = base + d * sum + leak;
        });
        let diffs: Vec<T> = pr.iter().zip(&next).map(|(&a, &b)| (a - b).abs()).collect();
        residual = pairwise_sum(&diffs).as_f64();
        std::mem::swap(&mut pr, &mut next);
        if residual < params.tol {
            return Ok(PageRankRun {
                values: pr,
                iterations: iter,
                converged: true,
                residual,
            });
        }
    }
    Ok(PageRankRun {
        values: pr,
        iterations: params.max_iter,
        converged: false,
        residual,
    })
}
