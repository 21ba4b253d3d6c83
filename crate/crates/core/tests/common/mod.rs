//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod corpus;
pub mod grad;

use std::collections::{BTreeSet, HashSet};

use citegan::graph::{build_graph_with_nodes, CitationEdge, CitationGraph};
use citegan::ssgan::Mlp;
use nalgebra::{DMatrix, DVector};
use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi style edge list on nodes `n0..n{n-1}` with random intents in
/// `0..k` (weights give the intent mix) and confidences.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64, weights: &[f64]) -> Vec<CitationEdge> {
    let total: f64 = weights.iter().sum();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.random_bool(p) {
                let mut u = rng.random::<f64>() * total;
                let mut intent = weights.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    if u < *w {
                        intent = i;
                        break;
                    }
                    u -= w;
                }
                let conf = (rng.random_range(0..=100) as f64) / 100.0;
                edges.push(CitationEdge::new(format!("n{a}"), format!("n{b}")).with_intent(intent, Some(conf)));
            }
        }
    }
    edges
}

/// Random graph on exactly `n` nodes, isolated ones included.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> CitationGraph {
    let nodes: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    build_graph_with_nodes(&nodes, &random_edges(rng, n, p, &[1.0, 1.0, 1.0]))
}

/// Dense adjacency (`adj[s][t]`), for oracles that ignore the CSR layout.
pub fn dense_adjacency(g: &CitationGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut adj = vec![vec![false; n]; n];
    for (s, t, _) in g.edges() {
        adj[s as usize][t as usize] = true;
    }
    adj
}

/// All-pairs distances and shortest-path counts by BFS over a dense matrix.
fn all_pairs(adj: &[Vec<bool>]) -> (Vec<Vec<Option<usize>>>, Vec<Vec<BigInt>>) {
    let n = adj.len();
    let mut dist = vec![vec![None; n]; n];
    let mut sigma = vec![vec![BigInt::zero(); n]; n];
    for s in 0..n {
        dist[s][s] = Some(0);
        sigma[s][s] = BigInt::one();
        let mut frontier = vec![s];
        let mut level = 0;
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for t in 0..n {
                if dist[s][t].is_some() {
                    continue;
                }
                let mut count = BigInt::zero();
                for &u in &frontier {
                    if adj[u][t] {
                        count += &sigma[s][u];
                    }
                }
                if !count.is_zero() {
                    dist[s][t] = Some(level);
                    sigma[s][t] = count;
                    next.push(t);
                }
            }
            frontier = next;
        }
    }
    (dist, sigma)
}

/// Betweenness by enumeration: for every ordered pair `(s, t)` with a path,
/// node `v` carries `sigma_sv * sigma_vt / sigma_st` of it when it lies on a
/// shortest path.
pub fn brute_force_betweenness(g: &CitationGraph) -> Vec<BigRational> {
    let adj = dense_adjacency(g);
    let n = adj.len();
    let (dist, sigma) = all_pairs(&adj);
    let mut out = vec![BigRational::zero(); n];
    for s in 0..n {
        for t in 0..n {
            let Some(dst) = dist[s][t] else { continue };
            if s == t {
                continue;
            }
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                if let (Some(a), Some(b)) = (dist[s][v], dist[v][t]) {
                    if a + b == dst {
                        let through = &sigma[s][v] * &sigma[v][t];
                        out[v] += BigRational::new(through, sigma[s][t].clone());
                    }
                }
            }
        }
    }
    out
}

/// Solves `(I - d M - d/N 1 c^T) x = (1 - d) 1` directly, where `M[a][t] =
/// 1/outdeg(t)` for each edge `t -> a` and `c` marks dangling nodes
/// (dropped when `redistribute` is false).
pub fn pagerank_linear_solve(g: &CitationGraph, d: f64, redistribute: bool) -> Vec<f64> {
    let n = g.node_count();
    let adj = dense_adjacency(g);
    let outdeg: Vec<usize> = adj.iter().map(|row| row.iter().filter(|&&x| x).count()).collect();
    let mut a = DMatrix::<f64>::identity(n, n);
    for t in 0..n {
        if outdeg[t] == 0 {
            if redistribute {
                for row in 0..n {
                    a[(row, t)] -= d / n as f64;
                }
            }
            continue;
        }
        for target in 0..n {
            if adj[t][target] {
                a[(target, t)] -= d / outdeg[t] as f64;
            }
        }
    }
    let b = DVector::<f64>::from_element(n, 1.0 - d);
    let x = a.lu().solve(&b).expect("PageRank system is non-singular");
    x.iter().copied().collect()
}

/// Floyd–Warshall distances; `dist[u][v]` walks edges from `u` to `v`.
pub fn floyd_warshall(adj: &[Vec<bool>]) -> Vec<Vec<Option<u64>>> {
    let n = adj.len();
    let mut dist: Vec<Vec<Option<u64>>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Some(0) } else if adj[i][j] { Some(1) } else { None }).collect())
        .collect();
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (dist[i][m], dist[m][j]) {
                    if dist[i][j].is_none_or(|c| a + b < c) {
                        dist[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    dist
}

/// Standard and literal incoming closeness from the definitions.
pub fn closeness_oracle(g: &CitationGraph) -> (Vec<f64>, Vec<f64>) {
    let adj = dense_adjacency(g);
    let n = adj.len();
    let dist = floyd_warshall(&adj);
    let mut standard = vec![0.0; n];
    let mut literal = vec![0.0; n];
    for v in 0..n {
        let reaching: Vec<u64> = (0..n).filter_map(|u| dist[u][v]).collect();
        let r = reaching.len();
        let total: u64 = reaching.iter().sum();
        literal[v] = total as f64 / n as f64;
        if r > 1 {
            standard[v] = ((r - 1) as f64 / total as f64) * ((r - 1) as f64 / (n - 1) as f64);
        }
    }
    (standard, literal)
}

/// Weak components by union-find over string-id edges; returns the count.
pub fn union_find_components(nodes: &[String], edges: &[(String, String)]) -> usize {
    let index: std::collections::HashMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, index[a.as_str()]), find(&mut parent, index[b.as_str()]));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..nodes.len()).filter(|&i| find(&mut parent, i) == i).count()
}

/// Naive filter on the raw edge list: `(nodes, deduplicated edges)` after
/// dropping edges with an intent in `removed`, and dropping nodes that lost
/// all their edges.
pub fn naive_filter(edges: &[CitationEdge], removed: &BTreeSet<usize>) -> (Vec<String>, Vec<(String, String)>) {
    let mut had_edge = HashSet::new();
    let mut nodes = Vec::new();
    let mut seen = HashSet::new();
    let mut kept_pairs = HashSet::new();
    let mut kept = Vec::new();
    // the deduplicated edge keeps its highest-confidence intent
    let mut best: std::collections::HashMap<(String, String), (f64, usize)> = Default::default();
    for e in edges.iter().filter(|e| e.citing_id != e.cited_id) {
        for id in [&e.citing_id, &e.cited_id] {
            had_edge.insert(id.clone());
            if seen.insert(id.clone()) {
                nodes.push(id.clone());
            }
        }
        let key = (e.citing_id.clone(), e.cited_id.clone());
        let conf = e.confidence.unwrap_or(f64::NEG_INFINITY);
        let intent = e.intent.expect("oracle needs intents");
        best.entry(key)
            .and_modify(|slot| {
                if conf > slot.0 {
                    *slot = (conf, intent);
                }
            })
            .or_insert((conf, intent));
    }
    for e in edges.iter().filter(|e| e.citing_id != e.cited_id) {
        let key = (e.citing_id.clone(), e.cited_id.clone());
        if !removed.contains(&best[&key].1) && kept_pairs.insert(key.clone()) {
            kept.push(key);
        }
    }
    let mut touched = HashSet::new();
    for (a, b) in &kept {
        touched.insert(a.clone());
        touched.insert(b.clone());
    }
    let nodes = nodes.into_iter().filter(|n| touched.contains(n) || !had_edge.contains(n)).collect();
    (nodes, kept)
}

/// Central finite-difference gradient of `loss` with respect to every
/// parameter of the MLP selected by `select`, in `param_slices` order.
pub fn finite_difference<M>(
    model: &mut M,
    select: fn(&mut M) -> &mut Mlp<f64>,
    loss: impl Fn(&M) -> f64,
    h: f64,
) -> Vec<f64> {
    let shapes: Vec<usize> = select(model).param_slices().map(<[f64]>::len).collect();
    let mut out = Vec::new();
    for (s, &len) in shapes.iter().enumerate() {
        for j in 0..len {
            let orig = select(model).param_slices_mut().nth(s).unwrap()[j];
            select(model).param_slices_mut().nth(s).unwrap()[j] = orig + h;
            let up = loss(model);
            select(model).param_slices_mut().nth(s).unwrap()[j] = orig - h;
            let down = loss(model);
            select(model).param_slices_mut().nth(s).unwrap()[j] = orig;
            out.push((up - down) / (2.0 * h));
        }
    }
    out
}

/// Relative error with a floor on the denominator so that gradients near
/// zero are compared absolutely.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}
