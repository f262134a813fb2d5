use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;

use crate::graph::{Graph, LabelId, NodeId, WildcardError};
use crate::membership::{member, sorbe_interval_with};
use crate::rbe::{normalize_product, Bag, Interval, ProductNormalForm, Rbe};
use crate::schema::{Definition, Schema, TypeId};
use crate::symbol::Label;

/// A typed symbol with interned label and type.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Sym {
    pub label: LabelId,
    pub ty: TypeId,
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}", self.label.0, self.ty.0)
    }
}

/// Per-label counts of sorted out-edges, indexed by position in a sorted
/// alphabet; `None` when some label lies outside it.
fn alphabet_counts(edges: &[(LabelId, NodeId)], alphabet: &[LabelId], counts: &mut [u64]) -> Option<()> {
    let mut pos = 0;
    for run in edges.chunk_by(|x, y| x.0 == y.0) {
        pos += alphabet[pos..].binary_search(&run[0].0).ok()?;
        counts[pos] = run.len() as u64;
    }
    Some(())
}

/// Runs `f` on a zeroed scratch slice of length `len`.
fn with_scratch<R>(len: usize, f: impl FnOnce(&mut [u64]) -> R) -> R {
    const INLINE: usize = 16;
    if len <= INLINE {
        f(&mut [0; INLINE][..len])
    } else {
        f(&mut vec![0; len])
    }
}

enum Shape {
    Any,
    /// Rule over alphabet positions.
    Sorbe(Rbe<u32>),
    Product(Vec<Interval>),
    Never,
    General(Rbe<LabelId>),
}

/// Decides `out-lab(n) ∈ π_Σ(δ(t))`.
struct LabelFilter {
    shape: Shape,
    alphabet: Vec<LabelId>,
    accepts_empty: bool,
}

impl LabelFilter {
    const ANY: LabelFilter = LabelFilter { shape: Shape::Any, alphabet: Vec::new(), accepts_empty: true };

    fn compile(e: &Rbe<LabelId>) -> LabelFilter {
        let alphabet: Vec<LabelId> = e.alphabet().into_iter().collect();
        let position = |l: &LabelId| alphabet.binary_search(l).expect("symbol is in the alphabet") as u32;
        let shape = match normalize_product(e) {
            Ok(ProductNormalForm::Product(m)) => Shape::Product(alphabet.iter().map(|l| m[l]).collect()),
            Ok(ProductNormalForm::Unsatisfiable) => Shape::Never,
            Err(_) if e.is_sorbe() => Shape::Sorbe(e.map_symbols(&mut |l| position(l))),
            Err(_) => Shape::General(e.clone()),
        };
        let mut filter = LabelFilter { shape, alphabet, accepts_empty: false };
        filter.accepts_empty = filter.evaluate(&[]);
        filter
    }

    /// `edges` must be sorted by label.
    fn accepts(&self, edges: &[(LabelId, NodeId)]) -> bool {
        if edges.is_empty() {
            self.accepts_empty
        } else {
            self.evaluate(edges)
        }
    }

    fn evaluate(&self, edges: &[(LabelId, NodeId)]) -> bool {
        match &self.shape {
            Shape::Any => true,
            Shape::Never => false,
            Shape::General(e) => {
                let w: Bag<LabelId> = edges.iter().map(|&(l, _)| l).collect();
                member(&w, e).map(|m| m.verdict).unwrap_or(false)
            }
            Shape::Sorbe(e) => with_scratch(self.alphabet.len(), |counts| {
                alphabet_counts(edges, &self.alphabet, counts).is_some()
                    && sorbe_interval_with(e, &|&p| counts[p as usize]).contains(1)
            }),
            Shape::Product(intervals) => with_scratch(self.alphabet.len(), |counts| {
                alphabet_counts(edges, &self.alphabet, counts).is_some()
                    && intervals.iter().zip(counts.iter()).all(|(i, &k)| i.contains(k))
            }),
        }
    }
}

/// A schema compiled against one (relabelled) graph: labels interned with
/// the graph's ids, successor table for deterministic schemas.
pub(crate) struct Compiled<'a> {
    pub schema: &'a Schema,
    pub graph: Cow<'a, Graph>,
    pub rules: Vec<Option<Rbe<Sym>>>,
    filters: Vec<LabelFilter>,
    /// `δ(t, a)` indexed by `t * label_count + a`, filled for deterministic types.
    successors: Vec<Option<TypeId>>,
    /// Per type: universal, or deterministic and single-occurrence.
    floodable: Vec<bool>,
    label_count: usize,
}

impl<'a> Compiled<'a> {
    pub fn new(g: &'a Graph, schema: &'a Schema) -> Result<Self, WildcardError> {
        let graph = schema.relabel(g)?;
        let mut label_ids: HashMap<Label, LabelId> =
            graph.labels().iter().enumerate().map(|(i, l)| (l.clone(), LabelId(i as u32))).collect();
        for l in schema.labels() {
            let next = LabelId(label_ids.len() as u32);
            label_ids.entry(l).or_insert(next);
        }
        let label_count = label_ids.len();
        let mut rules = Vec::with_capacity(schema.type_count());
        let mut filters = Vec::with_capacity(schema.type_count());
        for t in schema.type_ids() {
            match schema.definition(t) {
                Definition::Universal => {
                    rules.push(None);
                    filters.push(LabelFilter::ANY);
                }
                Definition::Expr(e) => {
                    let compiled = e.map_symbols(&mut |s| Sym {
                        label: label_ids[&s.label],
                        ty: schema.type_id(s.ty.as_str()).expect("referenced types are interned"),
                    });
                    filters.push(LabelFilter::compile(&compiled.map_symbols(&mut |s| s.label)));
                    rules.push(Some(compiled));
                }
            }
        }
        let mut successors = vec![None; schema.type_count() * label_count];
        let mut floodable = vec![true; schema.type_count()];
        for (t, rule) in rules.iter().enumerate() {
            let Some(rule) = rule else { continue };
            let mut seen: HashMap<LabelId, TypeId> = HashMap::new();
            let det = rule.alphabet().into_iter().all(|s| *seen.entry(s.label).or_insert(s.ty) == s.ty);
            floodable[t] = det && rule.is_sorbe();
            if det {
                for (l, u) in seen {
                    successors[t * label_count + l.index()] = Some(u);
                }
            }
        }
        Ok(Compiled { schema, graph, rules, filters, successors, floodable, label_count })
    }

    pub fn type_count(&self) -> usize {
        self.rules.len()
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn is_universal(&self, t: TypeId) -> bool {
        self.rules[t.index()].is_none()
    }

    /// `δ(t, a)`; `None` when `a` is absent from a deterministic `δ(t)`.
    pub fn successor(&self, t: TypeId, a: LabelId) -> Option<TypeId> {
        self.successors[t.index() * self.label_count + a.index()]
    }

    /// The first type reachable from `roots` through the rules that is not
    /// deterministic and single-occurrence.
    pub fn first_unfloodable(&self, roots: impl IntoIterator<Item = TypeId>) -> Option<TypeId> {
        let mut seen = vec![false; self.type_count()];
        let mut stack: Vec<TypeId> = roots.into_iter().collect();
        while let Some(t) = stack.pop() {
            if std::mem::replace(&mut seen[t.index()], true) {
                continue;
            }
            if !self.floodable[t.index()] {
                return Some(t);
            }
            if let Some(rule) = &self.rules[t.index()] {
                rule.visit_symbols(&mut |s, _| stack.push(s.ty));
            }
        }
        None
    }

    pub fn structure_ok(&self, n: NodeId, t: TypeId) -> bool {
        self.filters[t.index()].accepts(self.graph.out_edges(n))
    }
}
