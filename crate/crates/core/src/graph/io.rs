use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{build_graph_with_nodes, weakly_connected_components, CitationEdge, CitationGraph};
use crate::ingest::LabelSchema;
use crate::scalar::fmt_float;
use crate::{Error, Result};

pub const EDGE_HEADER: [&str; 4] = ["citing_id", "cited_id", "intent", "confidence"];
pub const NODE_HEADER: [&str; 2] = ["node_id", "component_label"];

fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str], what: &str) -> Result<()> {
    let header = rdr
        .headers()
        .map_err(|e| Error::Format(format!("{what} header: {e}")))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Format(format!(
            "{what} header must be {}",
            expected.join(",")
        )));
    }
    Ok(())
}

pub fn write_edges<W: Write>(edges: &[CitationEdge], schema: &LabelSchema, out: W) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Format(format!("edge csv: {e}"));
    w.write_record(EDGE_HEADER).map_err(wrap)?;
    for e in edges {
        let intent = match e.intent {
            Some(i) => schema
                .name(i)
                .ok_or_else(|| Error::Validation(format!("intent index {i} outside schema")))?,
            None => "",
        };
        let conf = e.confidence.map(fmt_float).unwrap_or_default();
        w.write_record([e.citing_id.as_str(), &e.cited_id, intent, &conf])
            .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(format!("edge csv: {e}")))?;
    Ok(edges.len())
}

pub fn read_edges<R: Read>(input: R, schema: &LabelSchema) -> Result<Vec<CitationEdge>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &EDGE_HEADER, "edge csv")?;
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Format(format!("edge csv line {line}: {e}")))?;
        let intent = match &row[2] {
            "" => None,
            name => Some(schema.index_of(name).ok_or_else(|| {
                Error::Validation(format!("edge csv line {line}: unknown intent {name:?}"))
            })?),
        };
        let confidence = match &row[3] {
            "" => None,
            text => {
                let c: f64 = text.parse().map_err(|_| {
                    Error::Format(format!("edge csv line {line}: bad confidence {text:?}"))
                })?;
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::Validation(format!(
                        "edge csv line {line}: confidence {c} outside [0,1]"
                    )));
                }
                Some(c)
            }
        };
        out.push(CitationEdge {
            citing_id: row[0].to_owned(),
            cited_id: row[1].to_owned(),
            intent,
            confidence,
        });
    }
    Ok(out)
}

/// One edge per deduplicated graph edge, in edge-id order.
pub fn graph_edges(g: &CitationGraph) -> Vec<CitationEdge> {
    g.edges()
        .map(|(s, t, a)| CitationEdge {
            citing_id: g.node_id(s).to_owned(),
            cited_id: g.node_id(t).to_owned(),
            intent: a.intent,
            confidence: a.confidence,
        })
        .collect()
}

pub fn write_nodes<W: Write>(g: &CitationGraph, out: W) -> Result<usize> {
    let comps = weakly_connected_components(g);
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Format(format!("node csv: {e}"));
    w.write_record(NODE_HEADER).map_err(wrap)?;
    for (id, label) in g.node_ids().iter().zip(&comps.labels) {
        w.write_record([id.as_str(), &label.to_string()]).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(format!("node csv: {e}")))?;
    Ok(g.node_count())
}

pub fn read_nodes<R: Read>(input: R) -> Result<Vec<String>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &NODE_HEADER, "node csv")?;
    rdr.records()
        .enumerate()
        .map(|(i, row)| {
            row.map(|r| r[0].to_owned())
                .map_err(|e| Error::Format(format!("node csv line {}: {e}", i + 2)))
        })
        .collect()
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_edge_list(edges: &[CitationEdge], schema: &LabelSchema, path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    with_path(path, write_edges(edges, schema, create(path)?))
}

pub fn read_edge_list(path: impl AsRef<Path>, schema: &LabelSchema) -> Result<Vec<CitationEdge>> {
    let path = path.as_ref();
    with_path(path, read_edges(open(path)?, schema))
}

/// Writes the edge CSV and the node CSV of a graph.
pub fn export_graph(
    g: &CitationGraph,
    schema: &LabelSchema,
    edges_path: impl AsRef<Path>,
    nodes_path: impl AsRef<Path>,
) -> Result<()> {
    write_edge_list(&graph_edges(g), schema, edges_path)?;
    let nodes_path = nodes_path.as_ref();
    with_path(nodes_path, write_nodes(g, create(nodes_path)?))?;
    Ok(())
}

/// Loads a graph from an edge CSV and, when given, a node CSV that fixes
/// node order and keeps isolated nodes.
pub fn load_graph(
    edges_path: impl AsRef<Path>,
    nodes_path: Option<&Path>,
    schema: &LabelSchema,
) -> Result<CitationGraph> {
    let edges = read_edge_list(edges_path, schema)?;
    let nodes = match nodes_path {
        Some(p) => with_path(p, read_nodes(open(p)?))?,
        None => Vec::new(),
    };
    Ok(build_graph_with_nodes(&nodes, &edges))
}
