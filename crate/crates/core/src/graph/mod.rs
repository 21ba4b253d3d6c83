//! Directed citation graphs and weak components.

mod classified;
mod components;
mod csr;
mod io;

pub use classified::classified_edges;
pub use components::{largest_component, weakly_connected_components, Components};
pub use csr::{build_graph, build_graph_with_nodes, BuildStats, CitationEdge, CitationGraph, EdgeAttr};
pub use io::{
    export_graph, graph_edges, load_graph, read_edge_list, read_edges, read_nodes, write_edge_list,
    write_edges, write_nodes, EDGE_HEADER, NODE_HEADER,
};
