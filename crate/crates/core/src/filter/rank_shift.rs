use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::centrality::{compute, rank_order, ranks, CentralitySettings, Metric};
use crate::graph::CitationGraph;
use crate::scalar::fmt_float;
use crate::{Error, Result, Scalar};

pub const DEFAULT_HORIZON: usize = 100;

pub const BUMP_HEADER: [&str; 6] = [
    "node_id",
    "rank_before",
    "rank_after",
    "value_before",
    "value_after",
    "dropped",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RankShiftRow {
    pub node_id: String,
    pub rank_before: usize,
    /// `None` when the node is gone or ranks beyond the horizon.
    pub rank_after: Option<usize>,
    pub value_before: f64,
    /// `None` when the node is not in the filtered graph.
    pub value_after: Option<f64>,
    pub dropped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankShiftReport {
    pub metric: Metric,
    pub k: usize,
    pub horizon: usize,
    pub rows: Vec<RankShiftRow>,
    /// False when either ranking came from a PageRank run that hit its cap.
    pub converged: bool,
}

impl RankShiftReport {
    /// `rank_after - rank_before` for rows still within the horizon.
    pub fn displacements(&self) -> Vec<Option<i64>> {
        self.rows
            .iter()
            .map(|r| r.rank_after.map(|a| a as i64 - r.rank_before as i64))
            .collect()
    }
}

/// Tracks the top `k` nodes of `before` into the full ranking of `after`.
pub fn rank_shift<T: Scalar>(
    before: &CitationGraph,
    after: &CitationGraph,
    metric: Metric,
    k: usize,
    horizon: usize,
    settings: &CentralitySettings,
) -> Result<RankShiftReport> {
    if k < 1 {
        return Err(Error::Parameter("rank shift needs K >= 1".into()));
    }
    if horizon < k {
        return Err(Error::Parameter(format!("horizon {horizon} is smaller than K = {k}")));
    }
    let vb = compute::<T>(before, metric, settings)?;
    let va = if after.is_empty() {
        None
    } else {
        Some(compute::<T>(after, metric, settings)?)
    };
    let after_ranks = va.as_ref().map(|v| ranks(v, after));
    let rows = rank_order(&vb, before)
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, node)| {
            let id = before.node_id(node);
            let found = after.node_index(id).zip(va.as_ref()).map(|(j, v)| {
                let rank = after_ranks.as_ref().expect("ranks exist with values")[j as usize];
                (rank, v.values[j as usize].as_f64())
            });
            let rank_after = found.map(|(r, _)| r).filter(|&r| r <= horizon);
            RankShiftRow {
                node_id: id.to_owned(),
                rank_before: i + 1,
                rank_after,
                value_before: vb.values[node as usize].as_f64(),
                value_after: found.map(|(_, v)| v),
                dropped: rank_after.is_none(),
            }
        })
        .collect();
    Ok(RankShiftReport {
        metric,
        k,
        horizon,
        rows,
        converged: vb.converged && va.is_none_or(|v| v.converged),
    })
}

pub fn write_bump_data<W: Write>(report: &RankShiftReport, out: W) -> Result<usize> {
    let mut rows: Vec<&RankShiftRow> = report.rows.iter().collect();
    rows.sort_by_key(|r| r.rank_before);
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Format(format!("bump csv: {e}"));
    w.write_record(BUMP_HEADER).map_err(wrap)?;
    for r in &rows {
        w.write_record([
            r.node_id.clone(),
            r.rank_before.to_string(),
            r.rank_after.map(|x| x.to_string()).unwrap_or_default(),
            fmt_float(r.value_before),
            r.value_after.map(fmt_float).unwrap_or_default(),
            r.dropped.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(format!("bump csv: {e}")))?;
    Ok(rows.len())
}

/// Writes bump-chart data to `path`, sorted by `rank_before`.
pub fn export_bump_data(report: &RankShiftReport, path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_bump_data(report, file).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Reads bump rows back. The CSV does not carry metric, K or horizon, so
/// those are supplied by the caller.
pub fn read_bump_data<R: Read>(input: R, metric: Metric, k: usize, horizon: usize) -> Result<RankShiftReport> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::Format(format!("bump csv header: {e}")))?;
    if header.iter().ne(BUMP_HEADER) {
        return Err(Error::Format(format!("bump csv header must be {}", BUMP_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Format(format!("bump csv line {line}: {e}")))?;
        let bad = |what: &str| Error::Format(format!("bump csv line {line}: bad {what}"));
        let opt = |s: &str| (!s.is_empty()).then(|| s.to_owned());
        rows.push(RankShiftRow {
            node_id: rec[0].to_owned(),
            rank_before: rec[1].parse().map_err(|_| bad("rank_before"))?,
            rank_after: opt(&rec[2])
                .map(|s| s.parse().map_err(|_| bad("rank_after")))
                .transpose()?,
            value_before: rec[3].parse().map_err(|_| bad("value_before"))?,
            value_after: opt(&rec[4])
                .map(|s| s.parse().map_err(|_| bad("value_after")))
                .transpose()?,
            dropped: rec[5].parse().map_err(|_| bad("dropped"))?,
        });
    }
    Ok(RankShiftReport {
        metric,
        k,
        horizon,
        rows,
        converged: true,
    })
}

pub fn read_bump_file(path: impl AsRef<Path>, metric: Metric, k: usize, horizon: usize) -> Result<RankShiftReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_bump_data(file, metric, k, horizon)
}
