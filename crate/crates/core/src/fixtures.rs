//! The four named graphs shipped with the crate.

use crate::graph::{parse_graph, Graph};

pub const E_INFINITY: &str = include_str!("../fixtures/e_infinity.graph");
pub const E_INFINITY_MINUS: &str = include_str!("../fixtures/e_infinity_minus.graph");
pub const GRAPH_E: &str = include_str!("../fixtures/graph_e.graph");
pub const GRAPH_F: &str = include_str!("../fixtures/graph_f.graph");

pub const NAMES: [&str; 4] = ["e_infinity", "e_infinity_minus", "graph_e", "graph_f"];

/// Source text of a fixture by name. A leading `fixtures/` and a trailing
/// `.graph` are ignored.
pub fn source(name: &str) -> Option<&'static str> {
    let name = name.strip_prefix("fixtures/").unwrap_or(name);
    let name = name.strip_suffix(".graph").unwrap_or(name);
    match name {
        "e_infinity" => Some(E_INFINITY),
        "e_infinity_minus" => Some(E_INFINITY_MINUS),
        "graph_e" => Some(GRAPH_E),
        "graph_f" => Some(GRAPH_F),
        _ => None,
    }
}

pub fn by_name(name: &str) -> Option<Graph> {
    source(name).map(|s| parse_graph(s).expect("shipped fixtures parse"))
}

pub fn e_infinity() -> Graph {
    parse_graph(E_INFINITY).expect("fixture parses")
}

pub fn e_infinity_minus() -> Graph {
    parse_graph(E_INFINITY_MINUS).expect("fixture parses")
}

pub fn graph_e() -> Graph {
    parse_graph(GRAPH_E).expect("fixture parses")
}

pub fn graph_f() -> Graph {
    parse_graph(GRAPH_F).expect("fixture parses")
}

pub fn all() -> Vec<(&'static str, Graph)> {
    NAMES.iter().map(|&n| (n, by_name(n).expect("known fixture"))).collect()
}
