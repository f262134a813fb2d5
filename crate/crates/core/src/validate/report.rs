use std::fmt::{self, Write};
use std::str::FromStr;

use super::flood::Mode;
use super::typing::MTyping;
use crate::graph::{Graph, LabelId, NodeId};
use crate::schema::{Schema, TypeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Refine,
    SRefine,
    Rbe0Refine,
    Flood,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Refine, Algorithm::SRefine, Algorithm::Rbe0Refine, Algorithm::Flood, Algorithm::Brute];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Refine => "refine",
            Algorithm::SRefine => "s-refine",
            Algorithm::Rbe0Refine => "rbe0-refine",
            Algorithm::Flood => "flood",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub node: NodeId,
    /// `None` when the node lost every type.
    pub ty: Option<TypeId>,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FloodStats {
    pub pairs_processed: usize,
    /// Out-edges looked at across all membership checks.
    pub edges_examined: usize,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub typing: MTyping,
    pub failures: Vec<Failure>,
    /// Edges of the input graph whose source has no type other than `TOP`.
    pub remaining: Vec<(NodeId, LabelId, NodeId)>,
    pub iterations: usize,
    pub flood: Option<FloodStats>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    /// Tab-separated lines: `TYPED node t1,t2`, `FAILED node type reason`,
    /// `REMAINING s p o`.
    pub fn render_machine(&self, g: &Graph, s: &Schema, typing: bool, remaining: bool) -> String {
        let mut out = String::new();
        if typing {
            for n in g.nodes() {
                if !self.typing.is_empty_at(n) {
                    let _ = writeln!(out, "TYPED\t{}\t{}", g.node_name(n), type_list(&self.typing, s, n));
                }
            }
        }
        for f in &self.failures {
            let ty = f.ty.map_or("-", |t| s.type_name(t).as_str());
            let _ = writeln!(out, "FAILED\t{}\t{}\t{}", g.node_name(f.node), ty, f.reason);
        }
        if remaining {
            for &(a, l, b) in &self.remaining {
                let _ = writeln!(out, "REMAINING\t{}\t{}\t{}", g.node_name(a), g.label(l), g.node_name(b));
            }
        }
        out
    }

    pub fn render_text(&self, g: &Graph, s: &Schema, typing: bool, remaining: bool) -> String {
        let mut out = String::new();
        let verdict = if self.is_valid() { "valid" } else { "invalid" };
        let _ = writeln!(out, "{verdict} ({}, {} rounds)", self.algorithm, self.iterations);
        if typing {
            for n in g.nodes() {
                if !self.typing.is_empty_at(n) {
                    let _ = writeln!(out, "  {} : {}", g.node_name(n), type_list(&self.typing, s, n));
                }
            }
        }
        for f in &self.failures {
            match f.ty {
                Some(t) => writeln!(out, "  failed {} as {}: {}", g.node_name(f.node), s.type_name(t), f.reason),
                None => writeln!(out, "  failed {}: {}", g.node_name(f.node), f.reason),
            }
            .expect("writing to a string");
        }
        if remaining {
            let _ = writeln!(out, "  {} remaining edges", self.remaining.len());
            for &(a, l, b) in &self.remaining {
                let _ = writeln!(out, "    {} {} {}", g.node_name(a), g.label(l), g.node_name(b));
            }
        }
        out
    }
}

pub(crate) fn type_list(typing: &MTyping, s: &Schema, n: NodeId) -> String {
    typing.types(n).map(|t| s.type_name(t).as_str()).collect::<Vec<_>>().join(",")
}

/// Edges `(n, a, m)` where `n` has no type besides `TOP`.
pub fn remaining_edges(g: &Graph, s: &Schema, typing: &MTyping) -> Vec<(NodeId, LabelId, NodeId)> {
    let top = s.top();
    let covered: Vec<bool> =
        g.nodes().map(|n| n.index() < typing.node_count() && typing.types(n).any(|t| Some(t) != top)).collect();
    g.edges().filter(|(n, _, _)| !covered[n.index()]).collect()
}
