use std::collections::VecDeque;

use super::context::Compiled;
use super::report::{Failure, FloodStats};
use super::typing::{MTyping, PreTyping};
use crate::graph::NodeId;
use crate::schema::TypeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Single,
    Multi,
}

pub(crate) struct FloodOutcome {
    pub typing: MTyping,
    pub failure: Option<Failure>,
    pub stats: FloodStats,
}

/// The minimal valid extension of `pre`: a FIFO frontier of `(node, type)`
/// pairs, each checked once against `δ(t)` with targets typed by `δ(t, a)`.
/// `ctx` must be deterministic and single-occurrence.
pub(crate) fn flood(ctx: &Compiled<'_>, pre: &PreTyping, mode: Mode) -> FloodOutcome {
    let g = &*ctx.graph;
    let mut typing = MTyping::empty(ctx.node_count(), ctx.type_count());
    let mut queued = MTyping::empty(ctx.node_count(), ctx.type_count());
    let mut single: Vec<Option<TypeId>> = vec![None; if mode == Mode::Single { ctx.node_count() } else { 0 }];
    let mut frontier: VecDeque<(NodeId, TypeId)> = VecDeque::new();
    let mut stats = FloodStats::default();
    let fail = |typing: MTyping, stats, node, ty, reason: String| FloodOutcome {
        typing,
        failure: Some(Failure { node, ty: Some(ty), reason }),
        stats,
    };
    for (n, t) in pre.iter() {
        if mode == Mode::Single {
            match single[n.index()] {
                Some(u) if u != t => {
                    let reason = format!("pre-typing gives a second type (already {})", ctx.schema.type_name(u));
                    return fail(typing, stats, n, t, reason);
                }
                _ => single[n.index()] = Some(t),
            }
        }
        if queued.insert(n, t) {
            frontier.push_back((n, t));
        }
    }
    while let Some((n, t)) = frontier.pop_front() {
        stats.pairs_processed += 1;
        if ctx.is_universal(t) {
            typing.insert(n, t);
            continue;
        }
        let edges = g.out_edges(n);
        stats.edges_examined += edges.len();
        if let Some(&(a, _)) = edges.iter().find(|&&(a, _)| ctx.successor(t, a).is_none()) {
            let reason = format!("label `{}` is not allowed by {}", g.label(a), ctx.schema.type_name(t));
            return fail(typing, stats, n, t, reason);
        }
        if !ctx.structure_ok(n, t) {
            let labels: Vec<String> = edges.iter().map(|&(a, _)| g.label(a).to_string()).collect();
            let reason = format!("out-labels [{}] do not match {}", labels.join(", "), ctx.schema.type_name(t));
            return fail(typing, stats, n, t, reason);
        }
        typing.insert(n, t);
        for &(a, m) in edges {
            let u = ctx.successor(t, a).expect("checked above");
            if ctx.is_universal(u) {
                continue;
            }
            if mode == Mode::Single {
                match single[m.index()] {
                    Some(prev) if prev != u => {
                        let reason = format!(
                            "node {} needs {} but already has {}",
                            g.node_name(m),
                            ctx.schema.type_name(u),
                            ctx.schema.type_name(prev)
                        );
                        return fail(typing, stats, n, t, reason);
                    }
                    _ => single[m.index()] = Some(u),
                }
            }
            if queued.insert(m, u) {
                frontier.push_back((m, u));
            }
        }
    }
    FloodOutcome { typing, failure: None, stats }
}
