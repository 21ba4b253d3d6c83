mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Status;

/// Citation intent classification and intent-filtered citation network analysis.
#[derive(Debug, Parser)]
#[command(name = "citegan", version)]
struct Cli {
    /// Worker threads; results do not depend on this. Defaults to the available parallelism.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse JSONL (or re-validate a record CSV) into the canonical record CSV.
    Ingest(IngestArgs),
    /// Make a stratified labeled/unlabeled/dev split file from records.
    Split(SplitArgs),
    /// Train the semi-supervised GAN classifier on precomputed embeddings.
    Train(TrainArgs),
    /// Predict intents; with --records, emit a classified edge list.
    Classify(ClassifyArgs),
    /// Score predictions against gold labels.
    Eval(EvalArgs),
    /// Build a citation graph from an edge list and summarize it.
    Graph(GraphArgs),
    /// Compute a centrality metric and rank nodes.
    Centrality(CentralityArgs),
    /// Remove citations by intent and report the structural impact and rank shifts.
    Filter(FilterArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Line-delimited JSON input.
    #[arg(long, required_unless_present = "csv", conflicts_with = "csv")]
    pub jsonl: Option<PathBuf>,
    /// Existing record CSV to validate and rewrite.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Treat --jsonl as unarXive full-paper objects instead of one context per line.
    #[arg(long, requires = "jsonl")]
    pub unarxive: bool,
    /// Field overrides for flat JSONL, e.g. `citing_id=meta.src,label=` (empty value unsets).
    #[arg(long, value_name = "KEY=PATH,...")]
    pub fields: Option<String>,
    /// Label schema file (one label per line) or preset `scicite` / `acl-arc`; needed for text labels.
    #[arg(long)]
    pub schema: Option<String>,
    /// Output record CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Write skipped input lines as `line,reason` CSV.
    #[arg(long)]
    pub skips: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Record CSV with gold intents.
    #[arg(long)]
    pub records: PathBuf,
    /// Label schema file or preset name.
    #[arg(long)]
    pub schema: String,
    /// Fraction of each class kept labeled in the training pool.
    #[arg(long, default_value_t = 0.1)]
    pub labeled_fraction: f64,
    /// Fraction of labeled records held out as dev before splitting (0 for none).
    #[arg(long, default_value_t = 0.0)]
    pub dev_fraction: f64,
    #[arg(long)]
    pub seed: u64,
    /// Output split CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// CEMB embedding file.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Label schema file or preset name.
    #[arg(long)]
    pub schema: String,
    /// Split CSV.
    #[arg(long)]
    pub split: PathBuf,
    /// key=value run config; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output checkpoint.
    #[arg(long)]
    pub out_model: PathBuf,
    /// Training log CSV.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    /// Hyperparameter preset: scicite or acl-arc.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr_discriminator: Option<f64>,
    #[arg(long)]
    pub lr_generator: Option<f64>,
    #[arg(long)]
    pub adam_epsilon: Option<f64>,
    #[arg(long)]
    pub warmup_proportion: Option<f64>,
    /// semi-supervised or supervised-only.
    #[arg(long)]
    pub objective: Option<commands::ObjectiveArg>,
    #[arg(long)]
    pub z_dim: Option<usize>,
    #[arg(long)]
    pub generator_hidden_layers: Option<usize>,
    #[arg(long)]
    pub discriminator_hidden_layers: Option<usize>,
    #[arg(long)]
    pub dropout: Option<f64>,
    #[arg(long)]
    pub leaky_slope: Option<f64>,
    /// Arithmetic precision: f32 or f64.
    #[arg(long)]
    pub precision: Option<commands::Precision>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Checkpoint written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// CEMB embedding file.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Label schema file or preset name.
    #[arg(long)]
    pub schema: String,
    /// Record CSV; when given, --out is an edge list `citing_id,cited_id,intent,confidence`.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Output: edge list with --records, otherwise predictions `record_id,intent,confidence`.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the per-record predictions here.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predictions CSV from `classify`.
    #[arg(long)]
    pub pred: PathBuf,
    /// Gold labels: a record CSV or a split CSV.
    #[arg(long)]
    pub gold: PathBuf,
    /// Label schema file or preset name.
    #[arg(long)]
    pub schema: String,
    /// Split partition scored when --gold is a split file.
    #[arg(long, default_value = "test")]
    pub partition: String,
    /// text or json.
    #[arg(long, default_value = "text")]
    pub format: commands::Format,
    /// F1 average: macro or micro.
    #[arg(long, default_value = "macro")]
    pub average: commands::AverageArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphSource {
    /// Edge list CSV `citing_id,cited_id,intent,confidence`.
    #[arg(long = "graph", alias = "edges")]
    pub edges: PathBuf,
    /// Node CSV `node_id,component_label`; fixes node order and keeps isolated nodes.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// Label schema file or preset name.
    #[arg(long)]
    pub schema: String,
    /// key=value run config; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub source: GraphSource,
    /// Keep only the largest weakly connected component.
    #[arg(long)]
    pub largest_wcc: bool,
    /// Export the (possibly reduced) graph's edges here.
    #[arg(long, requires = "out_nodes")]
    pub out_edges: Option<PathBuf>,
    /// Export node ids with component labels here.
    #[arg(long, requires = "out_edges")]
    pub out_nodes: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricFlags {
    /// PageRank damping factor in (0,1).
    #[arg(long)]
    pub damping: Option<f64>,
    /// PageRank L1 convergence tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// PageRank iteration cap.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// PageRank dangling-node handling: redistribute or drop.
    #[arg(long)]
    pub dangling: Option<commands::DanglingArg>,
    /// Closeness formula: standard or paper-literal.
    #[arg(long)]
    pub variant: Option<commands::VariantArg>,
    /// Closeness direction: incoming or outgoing.
    #[arg(long)]
    pub direction: Option<commands::DirectionArg>,
    /// Compute closeness and betweenness on the underlying undirected graph.
    #[arg(long)]
    pub undirected: bool,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    #[command(flatten)]
    pub source: GraphSource,
    /// in-degree, out-degree, betweenness, closeness or pagerank.
    #[arg(long)]
    pub metric: citegan::centrality::Metric,
    /// Rows to emit (default: all nodes).
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Rank the whole network instead of its largest weakly connected component.
    #[arg(long)]
    pub full_network: bool,
    #[command(flatten)]
    pub metric_flags: MetricFlags,
    /// Output CSV `node_id,metric,value,rank` (stdout when absent); metadata goes to `<out>.meta`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[command(flatten)]
    pub source: GraphSource,
    /// Comma-separated intent labels to remove; "" removes nothing.
    #[arg(long)]
    pub remove_intents: Option<String>,
    /// Only remove edges whose confidence is at least this.
    #[arg(long)]
    pub min_confidence: Option<f64>,
    /// Keep nodes that lose all their edges.
    #[arg(long)]
    pub keep_isolated: bool,
    /// Filter the largest weakly connected component instead of the full network.
    #[arg(long)]
    pub largest_wcc: bool,
    /// Write the impact table (text) here.
    #[arg(long)]
    pub impact: Option<PathBuf>,
    /// Write the impact numbers as CSV here.
    #[arg(long)]
    pub impact_csv: Option<PathBuf>,
    /// Export the filtered graph's edges here.
    #[arg(long, requires = "out_nodes")]
    pub out_edges: Option<PathBuf>,
    /// Export the filtered graph's nodes here.
    #[arg(long, requires = "out_edges")]
    pub out_nodes: Option<PathBuf>,
    /// Track the before-filter top-K of this metric into the filtered ranking.
    #[arg(long)]
    pub rank_shift: Option<citegan::centrality::Metric>,
    /// K for --rank-shift.
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Deepest filtered rank still reported.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Bump-chart CSV for --rank-shift (stdout when absent).
    #[arg(long, requires = "rank_shift")]
    pub bump: Option<PathBuf>,
    #[command(flatten)]
    pub metric_flags: MetricFlags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Split(a) => commands::split(a),
        Command::Train(a) => commands::train(a),
        Command::Classify(a) => commands::classify(a),
        Command::Eval(a) => commands::eval(a),
        Command::Graph(a) => commands::graph(a),
        Command::Centrality(a) => commands::centrality(a),
        Command::Filter(a) => commands::filter(a),
    };
    match result {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::NotConverged(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
