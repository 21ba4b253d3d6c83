use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{top_k, CentralityVector};
use crate::graph::CitationGraph;
use crate::scalar::fmt_float;
use crate::{Error, Result, Scalar};

pub const CENTRALITY_HEADER: [&str; 4] = ["node_id", "metric", "value", "rank"];

/// Writes ranked rows, best first; `k = None` writes every node.
pub fn write_centrality<T: Scalar, W: Write>(
    v: &CentralityVector<T>,
    g: &CitationGraph,
    k: Option<usize>,
    out: W,
) -> Result<usize> {
    let rows = top_k(v, g, k.unwrap_or(g.node_count()).max(1))?;
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Format(format!("centrality csv: {e}"));
    w.write_record(CENTRALITY_HEADER).map_err(wrap)?;
    for r in &rows {
        w.write_record([
            r.node_id.as_str(),
            v.metric.as_str(),
            &fmt_float(r.value.as_f64()),
            &r.rank.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(format!("centrality csv: {e}")))?;
    Ok(rows.len())
}

/// `key=value` lines describing how a vector was computed.
pub fn write_metadata<T, W: Write>(v: &CentralityVector<T>, g: &CitationGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "metric={}", v.metric)?;
    for (k, val) in v.params.describe() {
        writeln!(out, "{k}={val}")?;
    }
    writeln!(out, "converged={}", v.converged)?;
    if let Some(it) = v.iterations {
        writeln!(out, "iterations={it}")?;
    }
    writeln!(out, "nodes={}", g.node_count())?;
    writeln!(out, "edges={}", g.edge_count())
}

/// Sidecar path for a centrality CSV: `<path>.meta`.
pub fn metadata_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes the CSV and its metadata sidecar.
pub fn export_centrality<T: Scalar>(
    v: &CentralityVector<T>,
    g: &CitationGraph,
    k: Option<usize>,
    path: impl AsRef<Path>,
) -> Result<usize> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let rows = write_centrality(v, g, k, file)?;
    let meta = metadata_path(path);
    let file = File::create(&meta).map_err(|e| Error::io(&meta, e))?;
    write_metadata(v, g, file).map_err(|e| Error::io(&meta, e))?;
    Ok(rows)
}
