use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use anyhow::bail;
use citegan::centrality::{
    compute, write_centrality, write_metadata, export_centrality, CentralitySettings, ClosenessParams,
    ClosenessVariant, Dangling, Direction, PageRankParams,
};
use citegan::filter::{
    filter_graph, impact_report, rank_shift, render_impact_table, write_bump_data, write_impact_csv, FilterSpec,
    DEFAULT_HORIZON,
};
use citegan::graph::{
    classified_edges, export_graph, largest_component, load_graph, weakly_connected_components,
    write_edge_list, CitationGraph,
};
use citegan::ingest::{
    make_split, parse_jsonl, parse_unarxive, read_csv, read_embeddings, read_split, stratified_holdout, write_csv,
    write_split, FieldMap, LabelSchema, RECORD_HEADER, SPLIT_HEADER,
};
use citegan::ssgan::{
    classify as classify_all, evaluate, read_model, read_predictions_file, train as train_model, write_model,
    write_predictions_file, write_train_log, Average, GanModel, ModelConfig, Objective, TrainConfig,
};
use citegan::{Error, Scalar};

use crate::config::{Resolved, RunConfig};
use crate::{
    CentralityArgs, ClassifyArgs, EvalArgs, FilterArgs, GraphArgs, IngestArgs, MetricFlags, SplitArgs, TrainArgs,
};

/// How a subcommand finished when it did not fail outright.
pub enum Status {
    Done,
    /// Outputs were written, but an iterative method hit its cap.
    NotConverged(String),
}

/// 3 for convergence failures, 1 for every other error.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Convergence(_)) => 3,
        _ => 1,
    }
}

macro_rules! word_enum {
    ($name:ident { $($variant:ident => [$($word:literal),+]),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name { $($variant),+ }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s.to_ascii_lowercase().as_str() {
                    $($($word)|+ => Ok($name::$variant),)+
                    _ => Err(format!("unknown value {s:?}; expected one of: {}", [$($($word),+),+].join(", "))),
                }
            }
        }
    };
}

word_enum!(ObjectiveArg { Semi => ["semi-supervised", "semi"], Supervised => ["supervised-only", "supervised"] });
word_enum!(Precision { F32 => ["f32"], F64 => ["f64"] });
word_enum!(Format { Text => ["text"], Json => ["json"] });
word_enum!(AverageArg { Macro => ["macro"], Micro => ["micro"] });
word_enum!(DanglingArg { Redistribute => ["redistribute"], Drop => ["drop"] });
word_enum!(VariantArg { Standard => ["standard"], PaperLiteral => ["paper-literal", "paper_literal"] });
word_enum!(DirectionArg { Incoming => ["incoming"], Outgoing => ["outgoing"] });

fn load_schema(spec: &str) -> anyhow::Result<LabelSchema> {
    let path = Path::new(spec);
    if path.exists() {
        return Ok(LabelSchema::read(path)?);
    }
    match spec.to_ascii_lowercase().as_str() {
        "scicite" => Ok(LabelSchema::scicite()),
        "acl-arc" | "acl_arc" => Ok(LabelSchema::acl_arc()),
        _ => bail!(Error::Validation(format!(
            "schema {spec:?} is neither a file nor a preset (scicite, acl-arc)"
        ))),
    }
}

fn create(path: &Path) -> anyhow::Result<File> {
    File::create(path).map_err(|e| Error::Io { path: path.into(), source: e }.into())
}

fn open_buffered(path: &Path) -> anyhow::Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io { path: path.into(), source: e }.into())
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e }.into())
}

pub fn ingest(a: IngestArgs) -> anyhow::Result<Status> {
    let schema = a.schema.as_deref().map(load_schema).transpose()?;
    let mut resolved = Resolved::default();
    let (records, skips) = if let Some(src) = &a.jsonl {
        resolved.set("source", src.display());
        let outcome = if a.unarxive {
            resolved.set("layout", "unarxive");
            parse_unarxive(open_buffered(src)?)?
        } else {
            let fields = match &a.fields {
                Some(spec) => FieldMap::default().with_overrides(spec)?,
                None => FieldMap::default(),
            };
            resolved.set("layout", "flat");
            if let Some(spec) = &a.fields {
                resolved.set("fields", spec);
            }
            parse_jsonl(open_buffered(src)?, &fields, schema.as_ref())?
        };
        (outcome.records, outcome.skips.entries)
    } else {
        let src = a.csv.as_ref().expect("clap requires --jsonl or --csv");
        resolved.set("source", src.display());
        resolved.set("layout", "csv");
        (read_csv(src)?, Vec::new())
    };
    if let Some(s) = &a.schema {
        resolved.set("schema", s);
    }
    let n = write_csv(&records, &a.out)?;
    if let Some(path) = &a.skips {
        let mut out = create(path)?;
        let mut text = String::from("line,reason\n");
        for s in &skips {
            text.push_str(&format!("{},\"{}\"\n", s.line, s.reason.to_string().replace('"', "\"\"")));
        }
        out.write_all(text.as_bytes()).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    }
    resolved.write_beside(&a.out)?;
    println!("records: {n}");
    println!("skipped: {}", skips.len());
    Ok(Status::Done)
}

pub fn split(a: SplitArgs) -> anyhow::Result<Status> {
    let schema = load_schema(&a.schema)?;
    let records = read_csv(&a.records)?;
    let (pool, dev) = if a.dev_fraction > 0.0 {
        stratified_holdout(&records, a.dev_fraction, a.seed)?
    } else {
        (records, Vec::new())
    };
    let mut split = make_split(&pool, &schema, a.labeled_fraction, a.seed)?;
    if !dev.is_empty() {
        split = split.with_dev(&dev)?;
    }
    write_split(&split, &schema, &a.out)?;
    let mut resolved = Resolved::default();
    resolved.set("labeled_fraction", a.labeled_fraction);
    resolved.set("dev_fraction", a.dev_fraction);
    resolved.set("seed", a.seed);
    resolved.set("schema", &a.schema);
    resolved.write_beside(&a.out)?;
    for (partition, ids) in split.partitions() {
        println!("{}: {}", partition.as_str(), ids.len());
    }
    Ok(Status::Done)
}

fn objective_name(o: Objective) -> &'static str {
    match o {
        Objective::SemiSupervised => "semi-supervised",
        Objective::SupervisedOnly => "supervised-only",
    }
}

fn resolve_train(a: &TrainArgs, cfg: &RunConfig, k: usize, dim: usize) -> anyhow::Result<(ModelConfig, TrainConfig)> {
    let preset = cfg.resolve_opt("preset", a.preset.clone())?;
    let (mut model, mut train) = match preset.as_deref().map(str::to_ascii_lowercase).as_deref() {
        None | Some("scicite") => (ModelConfig::scicite(), TrainConfig::scicite()),
        Some("acl-arc") | Some("acl_arc") => (ModelConfig::acl_arc(), TrainConfig::acl_arc()),
        Some(other) => bail!(Error::Validation(format!("unknown preset {other:?}; expected scicite or acl-arc"))),
    };
    model.k = k;
    model.hidden_dim = dim;
    model.z_dim = cfg.resolve("z_dim", a.z_dim, model.z_dim)?;
    model.generator_hidden_layers = cfg.resolve("generator_hidden_layers", a.generator_hidden_layers, model.generator_hidden_layers)?;
    model.discriminator_hidden_layers =
        cfg.resolve("discriminator_hidden_layers", a.discriminator_hidden_layers, model.discriminator_hidden_layers)?;
    model.dropout = cfg.resolve("dropout", a.dropout, model.dropout)?;
    model.leaky_slope = cfg.resolve("leaky_slope", a.leaky_slope, model.leaky_slope)?;
    train.seed = a.seed;
    train.max_seq_len = cfg.resolve("max_seq_len", None, train.max_seq_len)?;
    train.epochs = cfg.resolve("epochs", a.epochs, train.epochs)?;
    train.batch_size = cfg.resolve("batch_size", a.batch_size, train.batch_size)?;
    train.lr_discriminator = cfg.resolve("lr_discriminator", a.lr_discriminator, train.lr_discriminator)?;
    train.lr_generator = cfg.resolve("lr_generator", a.lr_generator, train.lr_generator)?;
    train.adam_epsilon = cfg.resolve("adam_epsilon", a.adam_epsilon, train.adam_epsilon)?;
    train.warmup_proportion = cfg.resolve("warmup_proportion", a.warmup_proportion, train.warmup_proportion)?;
    let objective = cfg.resolve("objective", a.objective, ObjectiveArg::Semi)?;
    train.objective = match objective {
        ObjectiveArg::Semi => Objective::SemiSupervised,
        ObjectiveArg::Supervised => Objective::SupervisedOnly,
    };
    model.validate()?;
    train.validate()?;
    Ok((model, train))
}

fn run_training<T: Scalar>(
    model: ModelConfig,
    train: &TrainConfig,
    a: &TrainArgs,
    split: &citegan::ingest::DatasetSplit,
    embeddings: &citegan::ingest::EmbeddingSet,
) -> anyhow::Result<()> {
    let init = GanModel::<T>::new(model, train.seed)?;
    let outcome = train_model(init, split, embeddings, train)?;
    write_model(&outcome.model, &a.out_model)?;
    if let Some(log) = &a.log {
        write_train_log(&outcome.log, create(log)?).map_err(|e| Error::Format(format!("{}: {e}", log.display())))?;
    }
    for l in &outcome.log {
        let dev = l.dev_macro_f1.map(|f| format!("{:.4}", f)).unwrap_or_else(|| "-".into());
        println!(
            "epoch {:>3}  L_sup {:.6}  L_unsup {:.6}  L_G {:.6}  dev macro-F1 {dev}",
            l.epoch, l.sup, l.unsup, l.generator
        );
    }
    match outcome.best_epoch {
        Some(e) => println!("kept checkpoint from epoch {e}"),
        None => println!("kept checkpoint from the last epoch"),
    }
    Ok(())
}

pub fn train(a: TrainArgs) -> anyhow::Result<Status> {
    let cfg = RunConfig::load(a.config.as_deref())?;
    let schema = load_schema(&a.schema)?;
    let embeddings = read_embeddings(&a.embeddings)?;
    let split = read_split(&a.split, &schema)?;
    let (model, train) = resolve_train(&a, &cfg, schema.k(), embeddings.dim())?;
    let precision = cfg.resolve("precision", a.precision, Precision::F64)?;

    let mut resolved = Resolved::default();
    resolved.set("seed", train.seed);
    resolved.set("max_seq_len", train.max_seq_len);
    resolved.set("batch_size", train.batch_size);
    resolved.set("lr_discriminator", train.lr_discriminator);
    resolved.set("lr_generator", train.lr_generator);
    resolved.set("adam_epsilon", train.adam_epsilon);
    resolved.set("epochs", train.epochs);
    resolved.set("warmup_proportion", train.warmup_proportion);
    resolved.set("objective", objective_name(train.objective));
    resolved.set("precision", if precision == Precision::F32 { "f32" } else { "f64" });
    resolved.set("k", model.k);
    resolved.set("hidden_dim", model.hidden_dim);
    resolved.set("z_dim", model.z_dim);
    resolved.set("generator_hidden_layers", model.generator_hidden_layers);
    resolved.set("discriminator_hidden_layers", model.discriminator_hidden_layers);
    resolved.set("dropout", model.dropout);
    resolved.set("leaky_slope", model.leaky_slope);

    match precision {
        Precision::F32 => run_training::<f32>(model, &train, &a, &split, &embeddings)?,
        Precision::F64 => run_training::<f64>(model, &train, &a, &split, &embeddings)?,
    }
    resolved.write_beside(&a.out_model)?;
    Ok(Status::Done)
}

pub fn classify(a: ClassifyArgs) -> anyhow::Result<Status> {
    let schema = load_schema(&a.schema)?;
    let model: GanModel<f64> = read_model(&a.model)?;
    if model.config.k != schema.k() {
        bail!(Error::Validation(format!(
            "model has {} intents, schema {:?} has {}",
            model.config.k,
            a.schema,
            schema.k()
        )));
    }
    let embeddings = read_embeddings(&a.embeddings)?;
    let preds = classify_all(&model.discriminator, &embeddings)?;
    if let Some(p) = &a.predictions {
        write_predictions_file(&preds, &schema, p)?;
    }
    let mut resolved = Resolved::default();
    resolved.set("model", a.model.display());
    resolved.set("embeddings", a.embeddings.display());
    resolved.set("schema", &a.schema);
    match &a.records {
        Some(records_path) => {
            let records = read_csv(records_path)?;
            let edges = classified_edges(&records, &preds)?;
            write_edge_list(&edges, &schema, &a.out)?;
            resolved.set("records", records_path.display());
            println!("classified edges: {}", edges.len());
        }
        None => {
            write_predictions_file(&preds, &schema, &a.out)?;
            println!("predictions: {}", preds.len());
        }
    }
    resolved.write_beside(&a.out)?;
    Ok(Status::Done)
}

fn first_line(path: &Path) -> anyhow::Result<String> {
    let mut line = String::new();
    open_buffered(path)?
        .read_line(&mut line)
        .map_err(|e| Error::Io { path: path.into(), source: e })?;
    Ok(line.trim_end().to_owned())
}

fn load_gold(a: &EvalArgs, schema: &LabelSchema) -> anyhow::Result<BTreeMap<String, usize>> {
    let header = first_line(&a.gold)?;
    if header == SPLIT_HEADER.join(",") {
        let split = read_split(&a.gold, schema)?;
        let ids = split
            .partitions()
            .into_iter()
            .find(|(p, _)| p.as_str() == a.partition)
            .map(|(_, ids)| ids.to_vec())
            .ok_or_else(|| Error::Validation(format!("unknown partition {:?}", a.partition)))?;
        if ids.is_empty() {
            bail!(Error::Validation(format!("partition {:?} of {} is empty", a.partition, a.gold.display())));
        }
        Ok(ids.into_iter().map(|id| { let g = split.gold[&id]; (id, g) }).collect())
    } else if header == RECORD_HEADER.join(",") {
        Ok(read_csv(&a.gold)?
            .into_iter()
            .filter_map(|r| r.gold_intent.map(|g| (r.record_id, g)))
            .collect())
    } else {
        bail!(Error::Format(format!(
            "{}: gold file must be a record CSV or a split CSV",
            a.gold.display()
        )))
    }
}

pub fn eval(a: EvalArgs) -> anyhow::Result<Status> {
    let schema = load_schema(&a.schema)?;
    let gold = load_gold(&a, &schema)?;
    let preds: BTreeMap<String, usize> = read_predictions_file(&a.pred, &schema)?
        .into_iter()
        .filter(|p| gold.contains_key(&p.record_id))
        .map(|p| (p.record_id, p.intent))
        .collect();
    let report = evaluate(&preds, &gold, &schema)?;
    let average = match a.average {
        AverageArg::Macro => Average::Macro,
        AverageArg::Micro => Average::Micro,
    };
    let text = match a.format {
        Format::Text => report.to_text(average),
        Format::Json => serde_json_pretty(&report.to_json(average)),
    };
    match &a.out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(Status::Done)
}

fn serde_json_pretty(v: &impl std::fmt::Display) -> String {
    format!("{v:#}\n")
}

fn load_source(src: &crate::GraphSource, schema: &LabelSchema) -> anyhow::Result<CitationGraph> {
    Ok(load_graph(&src.edges, src.nodes.as_deref(), schema)?)
}

pub fn graph(a: GraphArgs) -> anyhow::Result<Status> {
    let schema = load_schema(&a.source.schema)?;
    let cfg = RunConfig::load(a.source.config.as_deref())?;
    let largest = a.largest_wcc || cfg.resolve("largest_wcc", None, false)?;
    let full = load_source(&a.source, &schema)?;
    let comps = weakly_connected_components(&full);
    let stats = full.build_stats();
    println!("nodes: {}", full.node_count());
    println!("edges: {}", full.edge_count());
    println!("raw citations: {}", full.raw_citation_count());
    println!("self-loops dropped: {}", stats.self_loops_dropped);
    println!("duplicates collapsed: {}", stats.duplicates_collapsed);
    println!("components: {}", comps.count());
    let g = if full.is_empty() {
        full
    } else {
        let lcc = largest_component(&full)?;
        println!("largest component: {} nodes, {} edges", lcc.node_count(), lcc.edge_count());
        if largest { lcc } else { full }
    };
    if let (Some(e), Some(n)) = (&a.out_edges, &a.out_nodes) {
        export_graph(&g, &schema, e, n)?;
        let mut resolved = Resolved::default();
        resolved.set("graph", a.source.edges.display());
        resolved.set("largest_wcc", largest);
        resolved.write_beside(e)?;
    }
    Ok(Status::Done)
}

fn resolve_settings(f: &MetricFlags, cfg: &RunConfig, resolved: &mut Resolved) -> anyhow::Result<CentralitySettings> {
    let d = PageRankParams::default();
    let dangling = cfg.resolve("dangling", f.dangling, DanglingArg::Redistribute)?;
    let variant = cfg.resolve("closeness_variant", f.variant, VariantArg::Standard)?;
    let direction = cfg.resolve("closeness_direction", f.direction, DirectionArg::Incoming)?;
    let undirected = f.undirected || cfg.resolve("undirected", None, false)?;
    let settings = CentralitySettings {
        betweenness_undirected: undirected,
        closeness: ClosenessParams {
            variant: match variant {
                VariantArg::Standard => ClosenessVariant::Standard,
                VariantArg::PaperLiteral => ClosenessVariant::PaperLiteral,
            },
            direction: match direction {
                DirectionArg::Incoming => Direction::Incoming,
                DirectionArg::Outgoing => Direction::Outgoing,
            },
            undirected,
        },
        pagerank: PageRankParams {
            damping: cfg.resolve("damping", f.damping, d.damping)?,
            tol: cfg.resolve("tol", f.tol, d.tol)?,
            max_iter: cfg.resolve("max_iter", f.max_iter, d.max_iter)?,
            dangling: match dangling {
                DanglingArg::Redistribute => Dangling::Redistribute,
                DanglingArg::Drop => Dangling::Drop,
            },
        },
    };
    settings.pagerank.validate()?;
    resolved.set("damping", settings.pagerank.damping);
    resolved.set("tol", settings.pagerank.tol);
    resolved.set("max_iter", settings.pagerank.max_iter);
    resolved.set("dangling", if dangling == DanglingArg::Drop { "drop" } else { "redistribute" });
    resolved.set("closeness_variant", if variant == VariantArg::PaperLiteral { "paper-literal" } else { "standard" });
    resolved.set("closeness_direction", if direction == DirectionArg::Outgoing { "outgoing" } else { "incoming" });
    resolved.set("undirected", undirected);
    Ok(settings)
}

pub fn centrality(a: CentralityArgs) -> anyhow::Result<Status> {
    let schema = load_schema(&a.source.schema)?;
    let cfg = RunConfig::load(a.source.config.as_deref())?;
    let mut resolved = Resolved::default();
    let settings = resolve_settings(&a.metric_flags, &cfg, &mut resolved)?;
    let largest = !a.full_network && cfg.resolve("largest_wcc", None, true)?;
    let top_k = cfg.resolve_opt("top_k", a.top_k)?;
    let full = load_source(&a.source, &schema)?;
    let g = if largest { largest_component(&full)? } else { full };
    let v = compute::<f64>(&g, a.metric, &settings)?;
    resolved.set("metric", a.metric);
    resolved.set("largest_wcc", largest);
    if let Some(k) = top_k {
        resolved.set("top_k", k);
    }
    match &a.out {
        Some(path) => {
            export_centrality(&v, &g, top_k, path)?;
            resolved.write_beside(path)?;
        }
        None => {
            let stdout = std::io::stdout();
            write_centrality(&v, &g, top_k, stdout.lock())?;
        }
    }
    if !v.converged {
        if a.out.is_none() {
            write_metadata(&v, &g, std::io::stderr().lock()).ok();
        }
        return Ok(Status::NotConverged(format!(
            "pagerank did not reach tol {} within {} iterations",
            settings.pagerank.tol, settings.pagerank.max_iter
        )));
    }
    Ok(Status::Done)
}

fn parse_intents(list: &str, schema: &LabelSchema) -> anyhow::Result<BTreeSet<usize>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            schema
                .index_of(name)
                .ok_or_else(|| Error::Validation(format!("unknown intent {name:?}")).into())
        })
        .collect()
}

pub fn filter(a: FilterArgs) -> anyhow::Result<Status> {
    let schema = load_schema(&a.source.schema)?;
    let cfg = RunConfig::load(a.source.config.as_deref())?;
    let mut resolved = Resolved::default();
    let remove = cfg.resolve_opt("remove_intents", a.remove_intents.clone())?.unwrap_or_default();
    let spec = FilterSpec {
        removed_intents: parse_intents(&remove, &schema)?,
        min_confidence: cfg.resolve_opt("min_confidence", a.min_confidence)?,
        drop_isolated_nodes: !a.keep_isolated && cfg.resolve("drop_isolated_nodes", None, true)?,
    };
    spec.validate(schema.k())?;
    let largest = a.largest_wcc || cfg.resolve("largest_wcc", None, false)?;
    resolved.set("remove_intents", &remove);
    if let Some(c) = spec.min_confidence {
        resolved.set("min_confidence", c);
    }
    resolved.set("drop_isolated_nodes", spec.drop_isolated_nodes);
    resolved.set("largest_wcc", largest);

    let full = load_source(&a.source, &schema)?;
    let before = if largest { largest_component(&full)? } else { full };
    let after = filter_graph(&before, &spec)?;
    let report = impact_report(&before, &after);
    let names: Vec<&str> = spec.removed_intents.iter().map(|&i| schema.name(i).unwrap()).collect();
    let column = if names.is_empty() { "nothing filtered".to_owned() } else { format!("{} filtered", names.join("+")) };
    let columns = vec![(column, report)];
    let table = render_impact_table(&columns);
    print!("{table}");
    let mut primary = None;
    if let Some(p) = &a.impact {
        write_text(p, &table)?;
        primary.get_or_insert(p.clone());
    }
    if let Some(p) = &a.impact_csv {
        write_impact_csv(&columns, create(p)?)?;
        primary.get_or_insert(p.clone());
    }
    if let (Some(e), Some(n)) = (&a.out_edges, &a.out_nodes) {
        export_graph(&after, &schema, e, n)?;
        primary.get_or_insert(e.clone());
    }

    let mut status = Status::Done;
    if let Some(metric) = a.rank_shift {
        let settings = resolve_settings(&a.metric_flags, &cfg, &mut resolved)?;
        let k = cfg.resolve("top_k", a.top_k, 20)?;
        let horizon = cfg.resolve("horizon", a.horizon, DEFAULT_HORIZON.max(k))?;
        resolved.set("rank_shift", metric);
        resolved.set("top_k", k);
        resolved.set("horizon", horizon);
        let shift = rank_shift::<f64>(&before, &after, metric, k, horizon, &settings)?;
        match &a.bump {
            Some(p) => {
                write_bump_data(&shift, create(p)?)?;
                primary.get_or_insert(p.clone());
            }
            None => {
                println!();
                write_bump_data(&shift, std::io::stdout().lock())?;
            }
        }
        if !shift.converged {
            status = Status::NotConverged(format!(
                "pagerank did not reach tol {} within {} iterations",
                settings.pagerank.tol, settings.pagerank.max_iter
            ));
        }
    }
    if let Some(p) = primary {
        resolved.write_beside(&p)?;
    }
    Ok(status)
}
