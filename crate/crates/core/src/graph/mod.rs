//! Edge-labelled directed graphs, their TSV format and wildcard relabelling.

mod tsv;
mod wildcard;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub use tsv::{parse_graph, serialize_graph, GraphParseError};
pub use wildcard::{check_disjoint, relabel_wildcards, LabelMatcher, WildcardDecl, WildcardError};

use crate::rbe::Bag;
use crate::symbol::Label;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LabelId(pub u32);

impl LabelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
}

/// A graph with interned node names and labels. Edges form a set unless the
/// graph came out of wildcard relabelling, which keeps one edge per source edge.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    labels: Vec<Label>,
    label_index: HashMap<Label, LabelId>,
    /// Out-edges of node `i` are `adjacency[offsets[i]..offsets[i + 1]]`.
    offsets: Vec<usize>,
    adjacency: Vec<(LabelId, NodeId)>,
}

/// Incremental construction; duplicate edges are dropped by [`GraphBuilder::build`].
#[derive(Default)]
pub struct GraphBuilder {
    g: Graph,
    pending: Vec<(NodeId, LabelId, NodeId)>,
    keep_parallel: bool,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.g.index.get(name) {
            return id;
        }
        let id = NodeId(self.g.names.len() as u32);
        self.g.names.push(name.to_string());
        self.g.index.insert(name.to_string(), id);
        id
    }

    pub fn intern_label(&mut self, label: &Label) -> LabelId {
        if let Some(&id) = self.g.label_index.get(label) {
            return id;
        }
        let id = LabelId(self.g.labels.len() as u32);
        self.g.labels.push(label.clone());
        self.g.label_index.insert(label.clone(), id);
        id
    }

    pub fn add_edge_ids(&mut self, s: NodeId, l: LabelId, o: NodeId) {
        self.pending.push((s, l, o));
    }

    pub fn add_edge(&mut self, s: &str, label: &str, o: &str) {
        let s = self.add_node(s);
        let o = self.add_node(o);
        let l = self.intern_label(&Label::new(label));
        self.add_edge_ids(s, l, o);
    }

    pub fn build(mut self) -> Graph {
        self.pending.sort_unstable();
        if !self.keep_parallel {
            self.pending.dedup();
        }
        let mut offsets = vec![0; self.g.names.len() + 1];
        for &(s, _, _) in &self.pending {
            offsets[s.index() + 1] += 1;
        }
        for i in 0..self.g.names.len() {
            offsets[i + 1] += offsets[i];
        }
        self.g.offsets = offsets;
        self.g.adjacency = self.pending.into_iter().map(|(_, l, o)| (l, o)).collect();
        self.g
    }
}

impl Graph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    /// Builds from `(subject, label, object)` triples.
    pub fn from_triples<'a>(triples: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>) -> Graph {
        let mut b = GraphBuilder::new();
        for (s, p, o) in triples {
            b.add_edge(s, p, o);
        }
        b.build()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.names.len() as u32).map(NodeId)
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.names[n.index()]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn label(&self, l: LabelId) -> &Label {
        &self.labels[l.index()]
    }

    pub fn label_id(&self, label: &Label) -> Option<LabelId> {
        self.label_index.get(label).copied()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Out-edges sorted by label then target.
    pub fn out_edges(&self, n: NodeId) -> &[(LabelId, NodeId)] {
        &self.adjacency[self.offsets[n.index()]..self.offsets[n.index() + 1]]
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, LabelId, NodeId)> + '_ {
        self.nodes().flat_map(move |s| self.out_edges(s).iter().map(move |&(l, o)| (s, l, o)))
    }

    fn lookup(&self, name: &str) -> Result<NodeId, GraphError> {
        self.node_id(name).ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    /// Bag of outgoing labels.
    pub fn out_lab(&self, name: &str) -> Result<Bag<Label>, GraphError> {
        let n = self.lookup(name)?;
        Ok(self.out_edges(n).iter().map(|&(l, _)| self.label(l).clone()).collect())
    }

    /// Set of outgoing `(label, target)` pairs.
    pub fn out_lab_node(&self, name: &str) -> Result<BTreeSet<(Label, String)>, GraphError> {
        let n = self.lookup(name)?;
        Ok(self.out_edges(n).iter().map(|&(l, o)| (self.label(l).clone(), self.node_name(o).to_string())).collect())
    }

    pub fn edge_set(&self) -> BTreeSet<(String, String, String)> {
        self.edges()
            .map(|(s, l, o)| (self.node_name(s).to_string(), self.label(l).to_string(), self.node_name(o).to_string()))
            .collect()
    }

    pub fn node_set(&self) -> BTreeSet<String> {
        self.names.iter().cloned().collect()
    }

    pub fn in_degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.node_count()];
        for (_, _, o) in self.edges() {
            d[o.index()] += 1;
        }
        d
    }

    /// Same nodes, labels replaced by `f`; parallel edges are kept.
    pub fn map_labels(&self, mut f: impl FnMut(&Label) -> Label) -> Graph {
        let mut b = GraphBuilder { keep_parallel: true, ..GraphBuilder::default() };
        for name in &self.names {
            b.add_node(name);
        }
        let ids: Vec<LabelId> = self.labels.iter().map(|l| b.intern_label(&f(l))).collect();
        for (s, l, o) in self.edges() {
            b.add_edge_ids(s, ids[l.index()], o);
        }
        b.build()
    }
}
