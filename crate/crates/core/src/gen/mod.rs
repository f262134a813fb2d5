//! Random schema-conforming graphs and the scaling benchmark.
//!
//! Randomness comes from `ChaCha8Rng` seeded with the 64-bit seed of the
//! configuration. All draws go through `u64` ranges, so a given
//! `(schema, config)` yields the same graph on every platform.

mod bench;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, LabelMatcher, NodeId, WildcardDecl};
use crate::rbe::{Interval, Rbe};
use crate::schema::{Definition, Schema, TypeId};
use crate::symbol::{Label, TypeName, TypedSymbol};
use crate::validate::{PreTyping, STyping};

pub use bench::{bench, render_csv, BenchError, BenchRow, CSV_HEADER};

/// Inclusive repetition range `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Range {
    pub lo: u64,
    pub hi: u64,
}

impl Range {
    pub const fn new(lo: u64, hi: u64) -> Self {
        Range { lo, hi }
    }
}

/// How many times `?`, `+` and `*` repeat, and how far above its lower
/// bound an interval `[n;m]` may go.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Multiplicities {
    pub opt: Range,
    pub plus: Range,
    pub star: Range,
    pub interval_span: u64,
}

impl Default for Multiplicities {
    fn default() -> Self {
        Multiplicities { opt: Range::new(0, 1), plus: Range::new(1, 15), star: Range::new(0, 15), interval_span: 15 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Number of non-leaf nodes.
    pub n_nodes: usize,
    pub seed: u64,
    pub multiplicities: Multiplicities,
}

impl GenConfig {
    pub fn new(n_nodes: usize, seed: u64) -> Self {
        GenConfig { n_nodes, seed, multiplicities: Multiplicities::default() }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("generation needs a deterministic single-occurrence schema; `{0}` is not")]
    Class(TypeName),
    #[error("invalid multiplicity range {0}")]
    InvalidRange(&'static str),
    #[error("every type is a leaf type; nothing to generate")]
    NoShapeTypes,
    #[error("no node of type `{0}` is available as a target")]
    NoCandidate(TypeName),
    #[error("wildcard `{0}` has no label that only it matches")]
    NoWildcardLabel(Label),
}

/// A generated graph with the typing it was built from and a root set
/// covering it by reachability.
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: Graph,
    pub typing: STyping,
    pub roots: PreTyping,
}

const RESAMPLE_ATTEMPTS: usize = 64;

struct Generator<'a> {
    schema: &'a Schema,
    rng: ChaCha8Rng,
    mult: Multiplicities,
    /// Concrete label choices for each wildcard name.
    wildcard_labels: BTreeMap<Label, Vec<Label>>,
}

impl Generator<'_> {
    fn draw(&mut self, r: Range) -> u64 {
        self.rng.gen_range(r.lo..=r.hi)
    }

    fn repetitions(&mut self, i: Interval) -> u64 {
        let (lo, hi) = i.bounds().expect("schemas hold no empty intervals");
        if i == Interval::OPT {
            self.draw(self.mult.opt)
        } else if i == Interval::STAR {
            self.draw(self.mult.star)
        } else if i == Interval::PLUS {
            self.draw(self.mult.plus)
        } else {
            let cap = lo + self.mult.interval_span;
            self.draw(Range::new(lo, hi.map_or(cap, |h| h.min(cap))))
        }
    }

    fn sample(&mut self, e: &Rbe<TypedSymbol>, out: &mut BTreeMap<TypedSymbol, u64>) {
        match e {
            Rbe::Epsilon => {}
            Rbe::Symbol(s, i) => {
                let k = self.repetitions(*i);
                if k > 0 {
                    *out.entry(s.clone()).or_default() += k;
                }
            }
            Rbe::Disj(items) => {
                let pick = self.rng.gen_range(0..items.len() as u64) as usize;
                self.sample(&items[pick], out);
            }
            Rbe::Concat(items) => items.iter().for_each(|b| self.sample(b, out)),
            Rbe::Star(b) | Rbe::Plus(b) => {
                let range = if matches!(e, Rbe::Star(_)) { self.mult.star } else { self.mult.plus };
                for _ in 0..self.draw(range) {
                    self.sample(b, out);
                }
            }
            Rbe::Inter(_) => unreachable!("schemas hold no intersections"),
        }
    }

    /// `k` distinct indices below `len` (Floyd's algorithm), sorted.
    fn distinct(&mut self, len: u64, k: u64) -> Vec<u64> {
        let mut chosen = BTreeSet::new();
        for j in len - k..len {
            let t = self.rng.gen_range(0..=j);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        chosen.into_iter().collect()
    }

    fn concrete_label(&mut self, l: &Label) -> Label {
        match self.wildcard_labels.get(l) {
            None => l.clone(),
            Some(options) => {
                let pick = self.rng.gen_range(0..options.len() as u64) as usize;
                options[pick].clone()
            }
        }
    }
}

fn is_leaf(s: &Schema, t: TypeId) -> bool {
    matches!(s.definition(t), Definition::Universal | Definition::Expr(Rbe::Epsilon))
}

fn wildcard_choices(s: &Schema) -> Result<BTreeMap<Label, Vec<Label>>, GenError> {
    let decls = s.effective_wildcards();
    let matched_elsewhere = |l: &Label, me: &WildcardDecl| {
        decls.iter().any(|d| {
            d.name != me.name
                && match &d.matcher {
                    LabelMatcher::Set(set) => set.contains(l),
                    LabelMatcher::Prefix(p) => l.as_str().starts_with(p.as_str()),
                    LabelMatcher::Rest => false,
                }
        })
    };
    let mut out = BTreeMap::new();
    for d in s.wildcards() {
        let options: Vec<Label> = match &d.matcher {
            LabelMatcher::Set(set) => set.iter().cloned().collect(),
            LabelMatcher::Prefix(p) => (0..4).map(|i| Label::new(format!("{p}{i}"))).collect(),
            LabelMatcher::Rest => (0..64)
                .map(|i| Label::new(format!("{}-{i}", d.name)))
                .find(|l| !matched_elsewhere(l, d))
                .into_iter()
                .collect(),
        };
        if options.is_empty() {
            return Err(GenError::NoWildcardLabel(d.name.clone()));
        }
        out.insert(d.name.clone(), options);
    }
    Ok(out)
}

fn check_config(m: &Multiplicities) -> Result<(), GenError> {
    for (name, r) in [("?", m.opt), ("+", m.plus), ("*", m.star)] {
        if r.lo > r.hi || r.hi == 0 {
            return Err(GenError::InvalidRange(name));
        }
    }
    if m.plus.lo == 0 {
        return Err(GenError::InvalidRange("+"));
    }
    Ok(())
}

/// Builds `cfg.n_nodes` nodes `n0, n1, …`, each with a uniformly drawn
/// non-leaf type, and realises each node's rule by sampling it. Targets of
/// leaf types (`ε` or `TOP`) are fresh nodes `v0, v1, …`; other targets are
/// distinct nodes of the required type drawn uniformly.
pub fn generate_graph(schema: &Schema, cfg: &GenConfig) -> Result<Generated, GenError> {
    check_config(&cfg.multiplicities)?;
    let classes = schema.classes();
    if let Err(e) = crate::schema::check_deterministic(schema) {
        return Err(GenError::Class(e.ty));
    }
    if !classes.sorbe {
        let offender = schema.type_ids().find(|&t| matches!(schema.definition(t), Definition::Expr(e) if !e.is_sorbe()));
        return Err(GenError::Class(schema.type_name(offender.expect("some rule is not single-occurrence")).clone()));
    }
    let shapes: Vec<TypeId> = schema.type_ids().filter(|&t| !is_leaf(schema, t)).collect();
    if shapes.is_empty() && cfg.n_nodes > 0 {
        return Err(GenError::NoShapeTypes);
    }
    let mut gen = Generator {
        schema,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        mult: cfg.multiplicities,
        wildcard_labels: wildcard_choices(schema)?,
    };

    let mut types: Vec<TypeId> = Vec::with_capacity(cfg.n_nodes);
    let mut of_type: Vec<Vec<u32>> = vec![Vec::new(); schema.type_count()];
    for i in 0..cfg.n_nodes {
        let t = shapes[gen.rng.gen_range(0..shapes.len() as u64) as usize];
        of_type[t.index()].push(i as u32);
        types.push(t);
    }

    let mut builder = Graph::builder();
    for i in 0..cfg.n_nodes {
        builder.add_node(&format!("n{i}"));
    }
    let mut leaves = 0usize;
    for i in 0..cfg.n_nodes {
        let Definition::Expr(rule) = gen.schema.definition(types[i]) else { unreachable!("shape types have rules") };
        let mut attempt = 0;
        let occurrences = loop {
            let mut occ = BTreeMap::new();
            gen.sample(rule, &mut occ);
            let fits = occ.iter().all(|(sym, &k)| {
                let u = schema.type_id(sym.ty.as_str()).expect("referenced types are interned");
                is_leaf(schema, u) || of_type[u.index()].len() as u64 >= k
            });
            if fits {
                break occ;
            }
            attempt += 1;
            if attempt == RESAMPLE_ATTEMPTS {
                let (sym, _) = occ
                    .iter()
                    .find(|(sym, &k)| {
                        let u = schema.type_id(sym.ty.as_str()).unwrap();
                        !is_leaf(schema, u) && (of_type[u.index()].len() as u64) < k
                    })
                    .unwrap();
                return Err(GenError::NoCandidate(sym.ty.clone()));
            }
        };
        let source = format!("n{i}");
        for (sym, k) in occurrences {
            let u = schema.type_id(sym.ty.as_str()).unwrap();
            if is_leaf(schema, u) {
                for _ in 0..k {
                    let leaf = format!("v{leaves}");
                    leaves += 1;
                    let label = gen.concrete_label(&sym.label);
                    builder.add_edge(&source, label.as_str(), &leaf);
                    types.push(u);
                }
            } else {
                let pool = &of_type[u.index()];
                for idx in gen.distinct(pool.len() as u64, k) {
                    let label = gen.concrete_label(&sym.label);
                    builder.add_edge(&source, label.as_str(), &format!("n{}", pool[idx as usize]));
                }
            }
        }
    }
    let graph = builder.build();
    let mut roots = PreTyping::new();
    for r in root_cover(&graph) {
        roots.add(r, types[r.index()]);
    }
    Ok(Generated { graph, typing: STyping::new(types), roots })
}

/// A set of nodes from which every node is reachable. Nodes without
/// incoming edges come first; afterwards the reached set is closed under
/// successors, so every unreached node has an unreached predecessor and the
/// first unreached node is taken.
pub fn root_cover(g: &Graph) -> Vec<NodeId> {
    let in_degrees = g.in_degrees();
    let mut reached = vec![false; g.node_count()];
    let mut roots = Vec::new();
    let mut stack = Vec::new();
    let sources = g.nodes().filter(|n| in_degrees[n.index()] == 0);
    let order: Vec<NodeId> = sources.chain(g.nodes()).collect();
    for root in order {
        if reached[root.index()] {
            continue;
        }
        roots.push(root);
        reached[root.index()] = true;
        stack.push(root);
        while let Some(n) = stack.pop() {
            for &(_, m) in g.out_edges(n) {
                if !std::mem::replace(&mut reached[m.index()], true) {
                    stack.push(m);
                }
            }
        }
    }
    roots
}
