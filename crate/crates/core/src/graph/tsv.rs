use std::fmt::Write;

use thiserror::Error;

use super::{Graph, GraphBuilder};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct GraphParseError {
    pub line: usize,
    pub msg: String,
}

/// Reads `subject\tlabel\tobject` lines; `node\t<id>` declares an isolated
/// node and lines starting with `#` are comments.
pub fn parse_graph(text: &str) -> Result<Graph, GraphParseError> {
    let mut b = GraphBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let err = |msg: &str| GraphParseError { line: i + 1, msg: msg.to_string() };
        if fields.iter().any(|f| f.is_empty()) {
            return Err(err("empty field"));
        }
        match fields.as_slice() {
            [s, p, o] => b.add_edge(s, p, o),
            ["node", id] => {
                b.add_node(id);
            }
            _ => return Err(err("expected `subject<TAB>label<TAB>object` or `node<TAB>id`")),
        }
    }
    Ok(b.build())
}

/// Writes edges grouped by subject; nodes without incident edges get a
/// `node` line.
pub fn serialize_graph(g: &Graph) -> String {
    let mut touched = vec![false; g.node_count()];
    for (s, _, o) in g.edges() {
        touched[s.index()] = true;
        touched[o.index()] = true;
    }
    let mut out = String::new();
    for n in g.nodes() {
        if !touched[n.index()] {
            let _ = writeln!(out, "node\t{}", g.node_name(n));
        }
    }
    for (s, l, o) in g.edges() {
        let _ = writeln!(out, "{}\t{}\t{}", g.node_name(s), g.label(l), g.node_name(o));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_isolated_node() {
        let text = "# comment\nn0\ta\tn1\nnode\tlonely\nn1\tb\tn0\n";
        let g = parse_graph(text).unwrap();
        let back = parse_graph(&serialize_graph(&g)).unwrap();
        assert_eq!(g.edge_set(), back.edge_set());
        assert_eq!(g.node_set(), back.node_set());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_graph("n0\ta\tn1\nbroken line\n").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
