//! Synthetic citation corpora.

use citegan::graph::CitationEdge;
use citegan::ingest::{EmbeddingSet, LabelSchema};
use rand::Rng;
use rand_distr::StandardNormal;

use super::rng;

fn pick_intent(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let mut u = rng.random::<f64>() * weights.iter().sum::<f64>();
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Growing citation network: each new paper cites one to three earlier
/// papers picked in proportion to `citations + 1`, with intents drawn from
/// `weights`.
pub fn growing_network(seed: u64, papers: usize, weights: &[f64]) -> Vec<CitationEdge> {
    let mut rng = rng(seed);
    let mut cited = vec![0usize; papers];
    let mut edges = Vec::new();
    for p in 1..papers {
        let refs = rng.random_range(1..=3).min(p);
        for _ in 0..refs {
            let total: usize = cited[..p].iter().map(|c| c + 1).sum();
            let mut u = rng.random_range(0..total);
            let mut target = 0;
            for (q, c) in cited[..p].iter().enumerate() {
                if u < c + 1 {
                    target = q;
                    break;
                }
                u -= c + 1;
            }
            cited[target] += 1;
            let intent = pick_intent(&mut rng, weights);
            let conf = rng.random_range(0.5..1.0);
            edges.push(CitationEdge::new(format!("P{p:05}"), format!("P{target:05}")).with_intent(intent, Some(conf)));
        }
    }
    edges
}

/// Small labeled corpus as flat JSONL plus matching embeddings whose class
/// means are well separated.
pub fn fixture_corpus(seed: u64, records: usize, dim: usize) -> (String, EmbeddingSet) {
    let schema = LabelSchema::scicite();
    let mut rng = rng(seed);
    let means: Vec<Vec<f64>> = (0..schema.k())
        .map(|_| (0..dim).map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let mut jsonl = String::new();
    let mut set = EmbeddingSet::new(dim).unwrap();
    for i in 0..records {
        let class = pick_intent(&mut rng, &[0.57, 0.40, 0.03 + 0.1]);
        let citing = rng.random_range(1..30);
        let cited = rng.random_range(0..citing);
        let id = format!("r{i:04}");
        let line = serde_json::json!({
            "record_id": id,
            "citing_id": format!("paper{citing}"),
            "cited_id": format!("paper{cited}"),
            "context": format!("context {i}, citing [{cited}]"),
            "section": "Introduction",
            "label": schema.name(class).unwrap(),
        });
        jsonl.push_str(&line.to_string());
        jsonl.push('\n');
        let v: Vec<f32> = means[class]
            .iter()
            .map(|m| (m + rng.sample::<f64, _>(StandardNormal)) as f32)
            .collect();
        set.push(id, &v).unwrap();
    }
    (jsonl, set)
}
