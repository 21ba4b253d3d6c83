//! One test per acceptance criterion. Each prints a PASS/FAIL line straight
//! to stderr so it shows up even when output is captured.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use citegan::centrality::{
    betweenness, export_centrality, pagerank, CentralitySettings, Metric, PageRankParams,
};
use citegan::filter::{
    export_bump_data, filter_graph, impact_report, rank_shift, render_impact_table, write_impact_csv, FilterSpec,
};
use citegan::graph::{
    build_graph, classified_edges, export_graph, largest_component, write_edge_list, CitationEdge,
};
use citegan::ingest::{
    make_split, parse_jsonl, stratified_holdout, write_embeddings_to, write_records, write_split, FieldMap,
    LabelSchema,
};
use citegan::ssgan::{
    blob_dataset, classify, macro_f1_on, train, write_model, write_train_log, BlobSpec, GanModel, ModelConfig,
    Objective, TrainConfig,
};
use num::{BigRational, ToPrimitive};
use rand::Rng;

const BETWEENNESS_TOL: f64 = 1e-12;
const BETWEENNESS_BUDGET: Duration = Duration::from_secs(10);
const PAGERANK_TOL: f64 = 1e-8;
const CYCLE_TOL: f64 = 1e-10;
const GRADIENT_BUDGET: Duration = Duration::from_secs(30);
const RUN_BUDGET: Duration = Duration::from_secs(60);
const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const REQUIRED_WINS: usize = 4;

fn verdict(name: &str, pass: bool, detail: &str) {
    let line = format!("[{}] {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "{name}: {detail}");
}

#[test]
fn centrality_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = common::rng(2024);
    let mut worst = 0.0f64;
    let mut exact_matches = 0;
    let mut nodes = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=40);
        let p = rng.random_range(0.03..0.25);
        let g = common::random_graph(&mut rng, n, p);
        nodes += n;
        let oracle = common::brute_force_betweenness(&g);
        if betweenness::<BigRational>(&g, false).values == oracle {
            exact_matches += 1;
        }
        for (f, r) in betweenness::<f64>(&g, false).values.iter().zip(&oracle) {
            worst = worst.max((f - r.to_f64().unwrap()).abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "betweenness vs brute-force enumeration",
        worst <= BETWEENNESS_TOL && exact_matches == 50 && elapsed < BETWEENNESS_BUDGET,
        &format!(
            "50 graphs ({nodes} nodes), rational Brandes exact on {exact_matches}/50, max |f64 - exact| = {worst:.2e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn pagerank_oracle_equivalence() {
    let mut rng = common::rng(4048);
    let params = PageRankParams::default();
    let mut worst = 0.0f64;
    let mut converged = 0;
    for _ in 0..20 {
        let n = rng.random_range(2..=100);
        let p = rng.random_range(0.01..0.15);
        let g = common::random_graph(&mut rng, n, p);
        let pr = pagerank::<f64>(&g, params).unwrap();
        converged += pr.converged as usize;
        let oracle = common::pagerank_linear_solve(&g, params.damping, true);
        for (a, b) in pr.values.iter().zip(&oracle) {
            worst = worst.max((a - b).abs());
        }
    }
    let cycle = build_graph(&[
        CitationEdge::new("a", "b"),
        CitationEdge::new("b", "c"),
        CitationEdge::new("c", "a"),
    ]);
    let pr = pagerank::<f64>(&cycle, params).unwrap();
    let cycle_err = pr.values.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    verdict(
        "pagerank vs dense linear solve",
        worst <= PAGERANK_TOL && converged == 20 && cycle_err <= CYCLE_TOL,
        &format!("20 graphs, {converged}/20 converged, L-inf {worst:.2e}; 3-cycle max |PR - 1| = {cycle_err:.2e}"),
    );
}

#[test]
fn gradient_correctness() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut checks = 0;
    for case in common::grad::cases() {
        for c in common::grad::check_case(&case) {
            worst = worst.max(c.max_rel_error);
            checks += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "gradients vs central finite differences",
        worst <= common::grad::TOLERANCE && elapsed < GRADIENT_BUDGET,
        &format!(
            "{checks} loss/network checks, step {:e}, max relative error {worst:.2e}, {:.2}s",
            common::grad::STEP,
            elapsed.as_secs_f64()
        ),
    );
}

fn blob_run(seed: u64, objective: Objective) -> (f64, Duration) {
    let start = Instant::now();
    let spec = BlobSpec::default();
    let (_, set, split) = blob_dataset(&spec, seed).unwrap();
    let model = GanModel::<f64>::new(spec.model_config(), seed).unwrap();
    let out = train(model, &split, &set, &spec.train_config(seed, objective)).unwrap();
    let dev: Vec<(Vec<f64>, usize)> = split
        .dev
        .iter()
        .map(|id| {
            let row = set.get(id).unwrap().iter().map(|&v| v as f64).collect();
            (row, split.gold[id])
        })
        .collect();
    let f1 = macro_f1_on(&out.model.discriminator, &dev).unwrap();
    (f1, start.elapsed())
}

#[test]
fn semi_supervised_gain() {
    let mut wins = 0;
    let mut slowest = Duration::ZERO;
    let mut pairs = Vec::new();
    for seed in SEEDS {
        let (semi, t1) = blob_run(seed, Objective::SemiSupervised);
        let (sup, t2) = blob_run(seed, Objective::SupervisedOnly);
        slowest = slowest.max(t1).max(t2);
        wins += (semi >= sup) as usize;
        pairs.push(format!("{seed}: {semi:.3}/{sup:.3}"));
    }
    verdict(
        "semi-supervised gain on blobs",
        wins >= REQUIRED_WINS && slowest < RUN_BUDGET,
        &format!(
            "semi >= supervised on {wins}/5 seeds (semi/sup dev macro-F1 {}), slowest run {:.1}s",
            pairs.join(", "),
            slowest.as_secs_f64()
        ),
    );
}

#[test]
fn filtering_pipeline_equivalence() {
    let mut rng = common::rng(31337);
    let mut mismatches = 0;
    let mut moved = 0;
    let settings = CentralitySettings::default();
    for i in 0..30 {
        let n = rng.random_range(2..=200);
        let p = rng.random_range(0.5..3.0) / n as f64;
        let edges = common::random_edges(&mut rng, n, p, &[0.57, 0.40, 0.03]);
        let g = build_graph(&edges);
        let removed: std::collections::BTreeSet<usize> = (0..3).filter(|_| rng.random_bool(0.5)).collect();
        let f = filter_graph(&g, &FilterSpec::removing(removed.iter().copied())).unwrap();
        let report = impact_report(&g, &f);
        let (nodes, kept) = common::naive_filter(&edges, &removed);
        let naive_before = common::union_find_components(g.node_ids(), &common::naive_filter(&edges, &Default::default()).1);
        let expected = (
            g.node_count(),
            g.edge_count(),
            naive_before,
            nodes.len(),
            kept.len(),
            common::union_find_components(&nodes, &kept),
        );
        let got = (
            report.before.nodes,
            report.before.edges,
            report.before.components,
            report.after.nodes,
            report.after.edges,
            report.after.components,
        );
        mismatches += (expected != got) as usize;
        if i < 10 && !g.is_empty() {
            let same = filter_graph(&g, &FilterSpec::default()).unwrap();
            let k = g.node_count().min(20);
            for metric in [Metric::InDegree, Metric::Closeness, Metric::PageRank, Metric::Betweenness] {
                let r = rank_shift::<f64>(&g, &same, metric, k, 100, &settings).unwrap();
                moved += r.displacements().iter().filter(|d| **d != Some(0)).count();
            }
        }
    }
    verdict(
        "filter + impact vs naive recompute",
        mismatches == 0 && moved == 0,
        &format!("30 graphs, {mismatches} count mismatches; no-op rank shift moved {moved} rows over 4 metrics"),
    );
}

#[test]
fn filter_impact_shape() {
    let edges = common::corpus::growing_network(57, 4000, &[0.57, 0.40, 0.03]);
    let g = build_graph(&edges);
    let names = ["background", "method", "result"];
    let reports: Vec<_> = (0..3)
        .map(|i| impact_report(&g, &filter_graph(&g, &FilterSpec::removing([i])).unwrap()))
        .collect();
    let edge_order = reports[0].edge_delta() < reports[1].edge_delta() && reports[1].edge_delta() < reports[2].edge_delta();
    let fragmenting = reports.iter().all(|r| r.after.components > r.before.components);
    let table = render_impact_table(
        &names.iter().zip(&reports).map(|(n, r)| (format!("{n} filtered"), *r)).collect::<Vec<_>>(),
    );
    let summary: Vec<String> = names
        .iter()
        .zip(&reports)
        .map(|(n, r)| {
            format!(
                "{n}: edges {:+.1}%, components {} -> {}",
                r.edge_delta() * 100.0,
                r.before.components,
                r.after.components
            )
        })
        .collect();
    std::io::stderr().write_all(table.as_bytes()).unwrap();
    verdict(
        "filter impact shape on a 57/40/3 synthetic corpus",
        edge_order && fragmenting,
        &summary.join("; "),
    );
}

/// Runs ingest -> split -> train -> classify -> graph -> centrality ->
/// filter into `dir`.
fn pipeline(dir: &Path, threads: usize) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let schema = LabelSchema::scicite();
        let (jsonl, embeddings) = common::corpus::fixture_corpus(7, 240, 8);
        let parsed = parse_jsonl(jsonl.as_bytes(), &FieldMap::default(), Some(&schema)).unwrap();
        assert!(parsed.skips.is_empty());
        let records = parsed.records;
        write_records(&records, std::fs::File::create(dir.join("records.csv")).unwrap()).unwrap();
        write_embeddings_to(&embeddings, std::fs::File::create(dir.join("embeddings.cemb")).unwrap()).unwrap();

        let (train_pool, dev) = stratified_holdout(&records, 0.25, 11).unwrap();
        let split = make_split(&train_pool, &schema, 0.2, 11).unwrap().with_dev(&dev).unwrap();
        write_split(&split, &schema, dir.join("split.csv")).unwrap();

        let model_cfg = ModelConfig {
            k: 3,
            hidden_dim: 8,
            z_dim: 8,
            generator_hidden_layers: 1,
            discriminator_hidden_layers: 1,
            dropout: 0.1,
            leaky_slope: 0.2,
        };
        let train_cfg = TrainConfig {
            max_seq_len: 0,
            batch_size: 16,
            lr_discriminator: 5e-3,
            lr_generator: 5e-3,
            adam_epsilon: 1e-8,
            epochs: 4,
            warmup_proportion: 0.1,
            seed: 99,
            objective: Objective::SemiSupervised,
        };
        let out = train(GanModel::<f64>::new(model_cfg, 99).unwrap(), &split, &embeddings, &train_cfg).unwrap();
        write_model(&out.model, dir.join("model.cgan")).unwrap();
        write_train_log(&out.log, std::fs::File::create(dir.join("train_log.csv")).unwrap()).unwrap();

        let preds = classify(&out.model.discriminator, &embeddings).unwrap();
        let edges = classified_edges(&records, &preds).unwrap();
        write_edge_list(&edges, &schema, dir.join("edges.csv")).unwrap();
        let g = build_graph(&edges);
        export_graph(&g, &schema, dir.join("graph_edges.csv"), dir.join("graph_nodes.csv")).unwrap();

        let lcc = largest_component(&g).unwrap();
        let settings = CentralitySettings::default();
        for metric in Metric::ALL {
            let v = citegan::centrality::compute::<f64>(&lcc, metric, &settings).unwrap();
            export_centrality(&v, &lcc, Some(20), dir.join(format!("centrality_{metric}.csv"))).unwrap();
        }

        let filtered = filter_graph(&g, &FilterSpec::removing([0])).unwrap();
        let report = impact_report(&g, &filtered);
        let columns = vec![("background filtered".to_owned(), report)];
        std::fs::write(dir.join("impact.txt"), render_impact_table(&columns)).unwrap();
        write_impact_csv(&columns, std::fs::File::create(dir.join("impact.csv")).unwrap()).unwrap();
        let shift = rank_shift::<f64>(&g, &filtered, Metric::PageRank, 10, 100, &settings).unwrap();
        export_bump_data(&shift, dir.join("bump_pagerank.csv")).unwrap();
    });
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn end_to_end_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path(), 1);
    pipeline(b.path(), 4);
    let (fa, fb) = (read_dir(a.path()), read_dir(b.path()));
    let differing: Vec<&String> = fa.keys().filter(|k| fa.get(*k) != fb.get(*k)).collect();
    let bytes: usize = fa.values().map(Vec::len).sum();
    verdict(
        "end-to-end determinism",
        fa.len() == fb.len() && differing.is_empty() && fa.len() >= 15,
        &format!(
            "{} output files ({bytes} bytes) compared across 1 and 4 threads; differing: {differing:?}",
            fa.len()
        ),
    );
}
