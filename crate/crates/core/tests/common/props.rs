//! Property checks over random or exhaustive instances, shared by the
//! property tests and the acceptance run. Each returns the number of
//! instances checked and a list of violations.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use shex_core::gen::{generate_graph, GenConfig, Multiplicities, Range};
use shex_core::graph::{Graph, NodeId};
use shex_core::rbe::{Bag, Rbe};
use shex_core::schema::{parse_schema, Schema, ShapeLanguage};
use shex_core::symbol::{TypeName, TypedSymbol};
use shex_core::validate::*;

use super::{graphs_up_to_iso, random_rbe, random_sorbe, rng, small_graph};

#[derive(Debug, Default)]
pub struct Outcome {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl Outcome {
    fn fail(&mut self, msg: String) {
        if self.violations.len() < 20 {
            self.violations.push(msg);
        }
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Caches membership answers of a language; exhaustive runs ask the same
/// questions many times.
pub struct Memo<'a, L> {
    inner: &'a L,
    cache: Vec<RefCell<HashMap<Bag<TypedSymbol>, bool>>>,
}

impl<'a, L: ShapeLanguage> Memo<'a, L> {
    pub fn new(inner: &'a L) -> Self {
        Memo { inner, cache: (0..inner.type_count()).map(|_| RefCell::default()).collect() }
    }
}

impl<L: ShapeLanguage> ShapeLanguage for Memo<'_, L> {
    fn type_count(&self) -> usize {
        self.inner.type_count()
    }

    fn type_name(&self, i: usize) -> TypeName {
        self.inner.type_name(i)
    }

    fn accepts(&self, i: usize, w: &Bag<TypedSymbol>) -> bool {
        if let Some(&v) = self.cache[i].borrow().get(w) {
            return v;
        }
        let v = self.inner.accepts(i, w);
        self.cache[i].borrow_mut().insert(w.clone(), v);
        v
    }
}

/// Schemas with at most two types over labels `a`, `b`.
pub const SCHEMA_POOL: [&str; 6] = [
    "t0 -> (a::t0 | a::t1)*, b::t1?\nt1 -> b::t0*",
    "t0 -> a::t1, b::t0*\nt1 -> eps | a::t0+",
    "t0 -> (a::t0, b::t1) | a::t1*\nt1 -> a::t0?, b::t1?",
    "t0 -> a::t0[1;2], (b::t1 | b::t0)\nt1 -> eps",
    "t0 -> (a::t0 | b::t0)+\nt1 -> a::t1*, b::t0*",
    "t0 -> (a::tc | a::t0)*, (b::tc)*\ntc -> (a::tc+ | b::tc), (a::t0)*, (b::tc)*",
];

fn type_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("t{i}")).collect()
}

fn build_schema(rules: Vec<(String, Rbe<TypedSymbol>)>) -> Schema {
    Schema::new(rules.into_iter().map(|(t, e)| (TypeName::new(t), e)).collect(), vec![]).unwrap()
}

fn typed(e: &Rbe<String>) -> Rbe<TypedSymbol> {
    e.map_symbols(&mut |s| {
        let (l, t) = s.split_once("::").unwrap();
        TypedSymbol::new(l, t)
    })
}

/// Arbitrary rules without intersection.
pub fn random_general_schema(r: &mut ChaCha8Rng, types: usize, labels: &[&str]) -> Schema {
    let names = type_names(types);
    let alphabet: Vec<String> = labels.iter().flat_map(|l| names.iter().map(move |t| format!("{l}::{t}"))).collect();
    build_schema(names.iter().map(|t| (t.clone(), typed(&random_rbe(r, &alphabet, 2, false)))).collect())
}

/// Deterministic single-occurrence rules; with `product`, each rule is a
/// concatenation of symbols with intervals.
pub fn random_det_schema(r: &mut ChaCha8Rng, types: usize, labels: &[&str], product: bool) -> Schema {
    let names = type_names(types);
    let rules = names
        .iter()
        .map(|t| {
            let alphabet: Vec<String> = labels.iter().map(|l| format!("{l}::{}", names.choose(r).unwrap())).collect();
            let e = if product {
                let mut syms = alphabet.clone();
                syms.shuffle(r);
                syms.truncate(r.gen_range(0..=syms.len()));
                Rbe::concat(syms.into_iter().map(|s| Rbe::sym_with(s, super::random_interval(r))).collect())
            } else {
                random_sorbe(r, &alphabet, 2)
            };
            (t.clone(), typed(&e))
        })
        .collect();
    build_schema(rules)
}

fn small_multiplicities() -> Multiplicities {
    Multiplicities { opt: Range::new(0, 1), plus: Range::new(1, 2), star: Range::new(0, 2), interval_span: 1 }
}

/// A generated graph for `s` with a few edges added or removed.
pub fn perturbed(r: &mut ChaCha8Rng, s: &Schema, n_nodes: usize, edits: usize) -> Option<(Graph, PreTyping)> {
    let cfg = GenConfig { n_nodes, seed: r.gen(), multiplicities: small_multiplicities() };
    let gen = generate_graph(s, &cfg).ok()?;
    if edits == 0 {
        return Some((gen.graph, gen.roots));
    }
    let g = &gen.graph;
    let mut triples: BTreeSet<(String, String, String)> =
        g.edges().map(|(a, l, b)| (g.node_name(a).to_string(), g.label(l).to_string(), g.node_name(b).to_string())).collect();
    let nodes: Vec<String> = g.nodes().map(|n| g.node_name(n).to_string()).collect();
    let labels: Vec<String> = s.labels().into_iter().map(|l| l.to_string()).collect();
    for _ in 0..edits {
        if r.gen_bool(0.5) && !triples.is_empty() {
            let victim = triples.iter().nth(r.gen_range(0..triples.len())).unwrap().clone();
            triples.remove(&victim);
        } else if !labels.is_empty() {
            triples.insert((nodes.choose(r).unwrap().clone(), labels.choose(r).unwrap().clone(), nodes.choose(r).unwrap().clone()));
        }
    }
    let mut b = Graph::builder();
    for n in &nodes {
        b.add_node(n);
    }
    for (x, l, y) in &triples {
        b.add_edge(x, l, y);
    }
    let out = b.build();
    let mut roots = PreTyping::new();
    for (n, t) in gen.roots.iter() {
        roots.add(out.node_id(g.node_name(n)).unwrap(), t);
    }
    Some((out, roots))
}

/// Every valid m-typing (empty sets allowed) is below `infer_types`, over
/// all graphs with at most three nodes on labels `a`, `b` and the pool.
pub fn maximality() -> Outcome {
    let mut out = Outcome::default();
    let schemas: Vec<Schema> = SCHEMA_POOL.iter().map(|t| parse_schema(t).unwrap()).collect();
    let memos: Vec<Memo<'_, Schema>> = schemas.iter().map(Memo::new).collect();
    for n in 1..=3 {
        for edges in graphs_up_to_iso(n, 2) {
            let g = small_graph(n, &edges);
            for (i, s) in schemas.iter().enumerate() {
                let top = infer_types(&g, s).unwrap();
                for_each_valid_m_typing(&g, &memos[i], true, DEFAULT_BRUTE_CAP, |m| {
                    if !m.leq(&top) {
                        out.fail(format!("pool schema {i}, graph {edges:?}"));
                    }
                })
                .unwrap();
                out.checked += 1;
            }
        }
    }
    out
}

/// The four refinement strategies reach one fixpoint on product-class
/// deterministic schemas over perturbed generated graphs.
pub fn strategy_equivalence(instances: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let mut r = rng(seed);
    while out.checked < instances {
        let types = r.gen_range(1..=4);
        let s = random_det_schema(&mut r, types, &["a", "b", "c"], true);
        let n = r.gen_range(3..=12);
        let edits = r.gen_range(0..=4);
        let Some((g, _)) = perturbed(&mut r, &s, n, edits) else { continue };
        let runs = [
            refine_fixpoint(&g, &s, Init::FullGamma, Strategy::General),
            refine_fixpoint(&g, &s, Init::FullGamma, Strategy::Flow),
            refine_fixpoint(&g, &s, Init::FullGamma, Strategy::DetMembership),
            refine_fixpoint(&g, &s, Init::StructureFiltered, Strategy::Structure),
        ];
        let fixpoints: Vec<MTyping> = runs.into_iter().map(|r| r.unwrap().0).collect();
        if fixpoints.iter().any(|f| f != &fixpoints[0]) {
            out.fail(format!("schema\n{s}\ngraph\n{}", shex_core::graph::serialize_graph(&g)));
        }
        out.checked += 1;
    }
    out
}

/// Flood in multi mode returns the least valid extension of the pre-typing
/// (the meet of all extensions found by enumeration), lies below
/// `infer_types`, and reproduces `infer_types` when started from it. In
/// single mode it examines each edge at most once.
pub fn flood_correctness(instances: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let mut r = rng(seed);
    while out.checked < instances {
        let product = r.gen_bool(0.5);
        let types = r.gen_range(1..=3);
        let s = random_det_schema(&mut r, types, &["a", "b"], product);
        let n = r.gen_range(2..=4);
        let edits = if r.gen_bool(0.5) { 0 } else { r.gen_range(1..=2) };
        let Some((g, roots)) = perturbed(&mut r, &s, n, edits) else { continue };
        if g.node_count() > 6 {
            continue;
        }
        let describe = || format!("schema\n{s}\ngraph\n{}", shex_core::graph::serialize_graph(&g));
        let pre = roots.to_multi(g.node_count(), s.type_count());
        let flood = flood_extension(&g, &s, &roots, Mode::Multi).unwrap();
        let maximal = infer_types(&g, &s).unwrap();
        let mut least: Option<MTyping> = None;
        for_each_valid_m_typing(&g, &s, true, DEFAULT_BRUTE_CAP, |m| {
            if pre.leq(m) {
                least = Some(least.take().map_or_else(|| m.clone(), |l| l.meet(m)));
            }
        })
        .unwrap();
        match (&least, flood.is_valid()) {
            (Some(l), true) => {
                if &flood.typing != l {
                    out.fail(format!("flood differs from the least extension\n{}", describe()));
                }
                if !flood.typing.leq(&maximal) {
                    out.fail(format!("flood above infer_types\n{}", describe()));
                }
            }
            (None, false) => {}
            _ => out.fail(format!("flood verdict {} disagrees with enumeration\n{}", flood.is_valid(), describe())),
        }
        if maximal.is_total() {
            let mut full = PreTyping::new();
            for n in g.nodes() {
                for t in maximal.types(n) {
                    full.add(n, t);
                }
            }
            let again = flood_extension(&g, &s, &full, Mode::Multi).unwrap();
            if !again.is_valid() || again.typing != maximal {
                out.fail(format!("flood from infer_types is not infer_types\n{}", describe()));
            }
        }
        let single = flood_extension(&g, &s, &roots, Mode::Single).unwrap();
        let examined = single.flood.unwrap().edges_examined;
        if examined > g.edge_count() {
            out.fail(format!("single mode examined {examined} > {} edges\n{}", g.edge_count(), describe()));
        }
        out.checked += 1;
    }
    out
}

/// Random trees (edges point away from the root).
pub fn random_tree(r: &mut ChaCha8Rng, nodes: usize, labels: usize) -> Graph {
    let mut edges = BTreeSet::new();
    for child in 1..nodes {
        edges.insert((r.gen_range(0..child), r.gen_range(0..labels), child));
    }
    small_graph(nodes, &edges)
}

/// On trees, multi-type validity and existence of a valid s-typing agree.
pub fn trees(instances: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let mut r = rng(seed);
    for _ in 0..instances {
        let types = r.gen_range(1..=3);
        let s = random_general_schema(&mut r, types, &["a", "b"]);
        let size = r.gen_range(1..=7);
        let g = random_tree(&mut r, size, 2);
        let multi = validate_multi(&g, &s, Algorithm::Refine, None).unwrap().is_valid();
        let single = brute_force_single(&g, &s).unwrap().is_some();
        if multi != single {
            out.fail(format!("multi {multi}, single {single}\nschema\n{s}\ngraph\n{}", shex_core::graph::serialize_graph(&g)));
        }
        out.checked += 1;
    }
    out
}

/// Every node with an incoming `b`-edge reaches a cycle.
pub fn b_targets_reach_cycles(g: &Graph) -> bool {
    let n = g.node_count();
    // A node reaches a cycle iff it is not removed by repeatedly deleting sinks.
    let mut out_deg: Vec<usize> = g.nodes().map(|v| g.out_edges(v).len()).collect();
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (a, _, b) in g.edges() {
        preds[b.index()].push(a);
    }
    let mut dead = vec![false; n];
    let mut stack: Vec<NodeId> = g.nodes().filter(|v| out_deg[v.index()] == 0).collect();
    while let Some(v) = stack.pop() {
        dead[v.index()] = true;
        for &p in &preds[v.index()] {
            out_deg[p.index()] -= 1;
            if out_deg[p.index()] == 0 {
                stack.push(p);
            }
        }
    }
    g.edges().filter(|&(_, l, _)| g.label(l).as_str() == "b").all(|(_, _, m)| !dead[m.index()])
}

fn cycle_case(g: &Graph, s: &Schema, memo: &Memo<'_, Schema>, out: &mut Outcome, what: &str) {
    let expected = b_targets_reach_cycles(g);
    let multi = validate_multi(g, s, Algorithm::Refine, None).unwrap().is_valid();
    let single = brute_force_single_lang(g, memo, None, DEFAULT_BRUTE_CAP).unwrap().is_some();
    if multi != expected || single != expected {
        out.fail(format!("{what}: expected {expected}, multi {multi}, single {single}\n{}", shex_core::graph::serialize_graph(g)));
    }
    out.checked += 1;
}

/// The cycle schema against the independent checker: all graphs with at
/// most three nodes, and `samples` random four-node graphs.
pub fn cycle_schema(s: &Schema, samples: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let memo = Memo::new(s);
    for n in 1..=3 {
        for edges in graphs_up_to_iso(n, 2) {
            cycle_case(&small_graph(n, &edges), s, &memo, &mut out, "exhaustive");
        }
    }
    let mut r = rng(seed);
    for _ in 0..samples {
        let density = r.gen_range(0.05..0.4);
        let edges: BTreeSet<_> = (0..4)
            .flat_map(|a| (0..2).flat_map(move |l| (0..4).map(move |b| (a, l, b))))
            .filter(|_| r.gen_bool(density))
            .collect();
        cycle_case(&small_graph(4, &edges), s, &memo, &mut out, "sampled");
    }
    out
}
