mod common;

use std::collections::BTreeSet;

use citegan::centrality::{CentralitySettings, Metric};
use citegan::filter::{filter_graph, impact_report, rank_shift, FilterSpec};
use citegan::graph::build_graph;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn filter_matches_naive_recompute(seed in any::<u64>(), n in 2usize..80, removed in prop::collection::btree_set(0usize..3, 0..3)) {
        let mut rng = common::rng(seed);
        let edges = common::random_edges(&mut rng, n, 0.04, &[0.57, 0.40, 0.03]);
        let g = build_graph(&edges);
        let f = filter_graph(&g, &FilterSpec::removing(removed.iter().copied())).unwrap();
        let (nodes, kept) = common::naive_filter(&edges, &removed);
        let report = impact_report(&g, &f);
        prop_assert_eq!(report.after.nodes, nodes.len());
        prop_assert_eq!(report.after.edges, kept.len());
        prop_assert_eq!(report.after.components, common::union_find_components(&nodes, &kept));
        prop_assert!(report.after.edges <= report.before.edges);
        prop_assert!(report.after.nodes <= report.before.nodes);
    }

    #[test]
    fn filtering_composes(seed in any::<u64>(), n in 2usize..60) {
        let mut rng = common::rng(seed);
        let g = build_graph(&common::random_edges(&mut rng, n, 0.06, &[0.5, 0.4, 0.1]));
        let step = filter_graph(&filter_graph(&g, &FilterSpec::removing([0])).unwrap(), &FilterSpec::removing([1])).unwrap();
        let once = filter_graph(&g, &FilterSpec::removing([0, 1])).unwrap();
        prop_assert!(step.same_structure(&once));
        let identity = filter_graph(&g, &FilterSpec { removed_intents: BTreeSet::new(), ..FilterSpec::default() }).unwrap();
        prop_assert!(identity.same_structure(&g));
    }
}

#[test]
fn no_op_rank_shift_is_zero_for_every_metric() {
    let mut rng = common::rng(9);
    let g = build_graph(&common::random_edges(&mut rng, 60, 0.05, &[1.0, 1.0, 1.0]));
    let same = filter_graph(&g, &FilterSpec::default()).unwrap();
    for metric in [Metric::InDegree, Metric::Closeness, Metric::PageRank, Metric::Betweenness] {
        let r = rank_shift::<f64>(&g, &same, metric, 20, 100, &CentralitySettings::default()).unwrap();
        assert_eq!(r.rows.len(), 20);
        assert!(r.displacements().iter().all(|d| *d == Some(0)), "{metric}");
    }
}
