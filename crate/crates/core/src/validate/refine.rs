use std::collections::BTreeSet;

use super::context::{Compiled, Sym};
use super::typing::MTyping;
use super::ValidateError;
use crate::graph::NodeId;
use crate::rbe::Rbe1;
use crate::sat::{inter1, inter1_flow, SatError};
use crate::schema::TypeId;

/// The non-emptiness test used to keep `t ∈ λ(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// INTER₁ of the flattened neighbourhood with `δ(t)`.
    General,
    /// The circulation test; needs product-class rules.
    Flow,
    /// Label membership in `π_Σ(δ(t))` plus successor check.
    DetMembership,
    /// Successor check only; label membership is settled by the initial typing.
    Structure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Init {
    FullGamma,
    StructureFiltered,
}

impl Strategy {
    pub(crate) fn check_class(self, ctx: &Compiled<'_>) -> Result<(), ValidateError> {
        let classes = ctx.schema.classes();
        let ok = match self {
            Strategy::General => true,
            Strategy::Flow => classes.rbe0,
            Strategy::DetMembership | Strategy::Structure => classes.deterministic && classes.sorbe,
        };
        if ok {
            Ok(())
        } else {
            let needs = if self == Strategy::Flow { "product-class rules" } else { "a deterministic single-occurrence schema" };
            Err(ValidateError::ClassMismatch { what: format!("{self:?} refinement"), needs })
        }
    }
}

fn survives(ctx: &Compiled<'_>, lambda: &MTyping, n: NodeId, t: TypeId, strategy: Strategy) -> Result<bool, ValidateError> {
    let Some(rule) = &ctx.rules[t.index()] else { return Ok(true) };
    let edges = ctx.graph.out_edges(n);
    match strategy {
        Strategy::DetMembership | Strategy::Structure => {
            if strategy == Strategy::DetMembership && !ctx.structure_ok(n, t) {
                return Ok(false);
            }
            Ok(edges.iter().all(|&(a, m)| ctx.successor(t, a).is_some_and(|u| lambda.contains(m, u))))
        }
        Strategy::General | Strategy::Flow => {
            let groups: Vec<BTreeSet<Sym>> =
                edges.iter().map(|&(a, m)| lambda.types(m).map(|ty| Sym { label: a, ty }).collect()).collect();
            let Some(flat) = Rbe1::new(groups) else { return Ok(false) };
            let verdict = if strategy == Strategy::Flow { inter1_flow(&flat, rule) } else { inter1(&flat, rule).map(|(v, _)| v) };
            verdict.map_err(|e| match e {
                SatError::Capped { cap, .. } => ValidateError::Capped { cap },
                other => ValidateError::Sat(other),
            })
        }
    }
}

/// One application of the refinement operator to every node.
pub(crate) fn refine_step(ctx: &Compiled<'_>, lambda: &MTyping, strategy: Strategy) -> Result<MTyping, ValidateError> {
    strategy.check_class(ctx)?;
    let mut next = lambda.clone();
    for n in ctx.graph.nodes() {
        refine_node(ctx, lambda, &mut next, n, strategy)?;
    }
    Ok(next)
}

fn refine_node(ctx: &Compiled<'_>, prev: &MTyping, next: &mut MTyping, n: NodeId, strategy: Strategy) -> Result<bool, ValidateError> {
    if strategy == Strategy::Structure && ctx.graph.out_edges(n).is_empty() {
        return Ok(false);
    }
    let mut changed = false;
    for t in prev.types(n) {
        if !survives(ctx, prev, n, t, strategy)? {
            next.remove(n, t);
            changed = true;
        }
    }
    Ok(changed)
}

pub(crate) fn initial_typing(ctx: &Compiled<'_>, init: Init) -> MTyping {
    let (nodes, types) = (ctx.node_count(), ctx.type_count());
    match init {
        Init::FullGamma => MTyping::full(nodes, types),
        Init::StructureFiltered => {
            let mut m = MTyping::empty(nodes, types);
            for n in ctx.graph.nodes() {
                for t in (0..types as u32).map(TypeId) {
                    if ctx.is_universal(t) || ctx.structure_ok(n, t) {
                        m.insert(n, t);
                    }
                }
            }
            m
        }
    }
}

/// Distinct predecessors of every node, in one flat array.
struct Predecessors {
    start: Vec<usize>,
    nodes: Vec<NodeId>,
}

impl Predecessors {
    fn new(ctx: &Compiled<'_>) -> Self {
        let mut start = vec![0; ctx.node_count() + 1];
        let mut last: Vec<Option<NodeId>> = vec![None; ctx.node_count()];
        let distinct = |last: &mut Vec<Option<NodeId>>, s: NodeId, o: NodeId| last[o.index()].replace(s) != Some(s);
        for (s, _, o) in ctx.graph.edges() {
            if distinct(&mut last, s, o) {
                start[o.index() + 1] += 1;
            }
        }
        for i in 0..ctx.node_count() {
            start[i + 1] += start[i];
        }
        last.fill(None);
        let mut fill = start.clone();
        let mut nodes = vec![NodeId(0); start[ctx.node_count()]];
        for (s, _, o) in ctx.graph.edges() {
            if distinct(&mut last, s, o) {
                nodes[fill[o.index()]] = s;
                fill[o.index()] += 1;
            }
        }
        Predecessors { start, nodes }
    }

    fn of(&self, n: NodeId) -> &[NodeId] {
        &self.nodes[self.start[n.index()]..self.start[n.index() + 1]]
    }
}

/// Round-based iteration to the fixpoint. A round only revisits the
/// predecessors of nodes that changed in the previous round; the others
/// would reproduce their current sets. Returns the typing and round count.
pub(crate) fn refine_fixpoint(ctx: &Compiled<'_>, init: Init, strategy: Strategy) -> Result<(MTyping, usize), ValidateError> {
    strategy.check_class(ctx)?;
    let mut lambda = initial_typing(ctx, init);
    let node_count = ctx.node_count();
    let preds = Predecessors::new(ctx);
    let mut dirty: Vec<NodeId> = ctx.graph.nodes().collect();
    let mut mark = vec![false; node_count];
    let mut rounds = 0;
    while !dirty.is_empty() {
        rounds += 1;
        let mut next = lambda.clone();
        let mut changed = Vec::new();
        for &n in &dirty {
            if refine_node(ctx, &lambda, &mut next, n, strategy)? {
                changed.push(n);
            }
        }
        lambda = next;
        dirty.clear();
        for n in changed {
            for &p in preds.of(n) {
                if !mark[p.index()] {
                    mark[p.index()] = true;
                    dirty.push(p);
                }
            }
        }
        for &p in &dirty {
            mark[p.index()] = false;
        }
        dirty.sort_unstable();
    }
    Ok((lambda, rounds))
}

/// The preferred strategy for plain refinement of this schema.
pub(crate) fn default_strategy(ctx: &Compiled<'_>) -> Strategy {
    let c = ctx.schema.classes();
    if c.deterministic && c.sorbe {
        Strategy::DetMembership
    } else {
        Strategy::General
    }
}
