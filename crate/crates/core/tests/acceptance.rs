//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use common::props::{self, Memo, Outcome, SCHEMA_POOL};
use common::*;
use rand::Rng;
use shex_core::gen::{generate_graph, GenConfig};
use shex_core::graph::Graph;
use shex_core::rbe::{normalize_product, parse_plain, Bag, Interval, ProductNormalForm, Rbe, Rbe1};
use shex_core::sat::{inter1_flow, inter1_ilp, is_unambiguous, rbe_satisfiable, satisfiable_by_ilp, IlpConfig, Satisfiability};
use shex_core::schema::{check_deterministic, homomorphism_schema, intersect_schemas, parse_schema, powerset_schema, Definition};
use shex_core::symbol::TypedSymbol;
use shex_core::membership::member;
use shex_core::validate::*;

/// Membership from the definition, memoized on (subexpression, bag).
#[derive(Default)]
struct DefOracle {
    cache: HashMap<(usize, u8, usize, Bag<Sym>), bool>,
}

impl DefOracle {
    fn member(&mut self, e: &Rbe<Sym>, w: &Bag<Sym>) -> bool {
        let key = (e as *const _ as usize, 0, 0, w.clone());
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let v = match e {
            Rbe::Epsilon => w.is_empty(),
            Rbe::Symbol(a, i) => w.iter().all(|(s, _)| s == a) && i.contains(w.count(a)),
            Rbe::Disj(v) => v.iter().any(|x| self.member(x, w)),
            Rbe::Inter(v) => v.iter().all(|x| self.member(x, w)),
            Rbe::Concat(v) => self.concat(v, w),
            Rbe::Star(b) => self.star(b, w),
            Rbe::Plus(b) => sub_bags(w).iter().any(|u| self.member(b, u) && self.star(b, &minus(w, u))),
        };
        self.cache.insert(key, v);
        v
    }

    fn concat(&mut self, items: &[Rbe<Sym>], w: &Bag<Sym>) -> bool {
        let Some((first, rest)) = items.split_first() else { return w.is_empty() };
        let key = (items.as_ptr() as usize, 1, items.len(), w.clone());
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let v = sub_bags(w).iter().any(|u| self.member(first, u) && self.concat(rest, &minus(w, u)));
        self.cache.insert(key, v);
        v
    }

    fn star(&mut self, body: &Rbe<Sym>, w: &Bag<Sym>) -> bool {
        if w.is_empty() {
            return true;
        }
        let key = (body as *const _ as usize, 2, 0, w.clone());
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let v = sub_bags(w).iter().any(|u| !u.is_empty() && self.member(body, u) && self.star(body, &minus(w, u)));
        self.cache.insert(key, v);
        v
    }
}

fn minus(w: &Bag<Sym>, u: &Bag<Sym>) -> Bag<Sym> {
    w.iter().map(|(s, &c)| (s.clone(), c - u.count(s))).collect()
}

fn depth<S>(e: &Rbe<S>) -> usize {
    match e {
        Rbe::Epsilon | Rbe::Symbol(..) => 1,
        Rbe::Disj(v) | Rbe::Concat(v) | Rbe::Inter(v) => 1 + v.iter().map(depth).max().unwrap_or(0),
        Rbe::Star(b) | Rbe::Plus(b) => 1 + depth(b),
    }
}

fn check(out: &mut Outcome, ok: bool, what: impl FnOnce() -> String) {
    out.checked += 1;
    if !ok {
        out.violations.push(what());
    }
}

fn fixtures_typings() -> Outcome {
    let mut out = Outcome::default();
    let (g0, s0) = (fixtures::graph("g0.tsv"), fixtures::schema("s0.shex"));
    check(&mut out, check_s_typing(&g0, &s0, &fixtures::s_typing("g0.typing", &g0, &s0)), || "λ0 rejected".into());
    let (g1, s1) = (fixtures::graph("g1.tsv"), fixtures::schema("s1.shex"));
    check(&mut out, check_s_typing(&g1, &s1, &fixtures::s_typing("g1.typing", &g1, &s1)), || "λ1 rejected".into());
    let g2 = fixtures::graph("g2.tsv");
    check(&mut out, brute_force_single(&g2, &s1).unwrap().is_none(), || "G2 has a single-type typing".into());
    let mut lambda2 = MTyping::empty(g2.node_count(), s1.type_count());
    for (n, ts) in [("n0", &["t0"][..]), ("n1", &["t1", "t2"]), ("n2", &["t3"])] {
        for t in ts {
            lambda2.insert(g2.node_id(n).unwrap(), s1.type_id(t).unwrap());
        }
    }
    let report = validate_multi(&g2, &s1, Algorithm::Refine, None).unwrap();
    check(&mut out, report.is_valid() && lambda2.leq(&report.typing), || "validate_multi on G2".into());
    check(&mut out, infer_types(&g2, &s1).unwrap() == lambda2, || "infer_types on G2".into());
    out
}

fn sorbe_membership() -> Outcome {
    let mut out = Outcome::default();
    let mut r = rng(101);
    let alphabet = symbols(6);
    while out.checked < 2000 {
        let e = random_sorbe(&mut r, &alphabet, 2);
        if depth(&e) > 4 {
            continue;
        }
        let mut w = Bag::new();
        for s in &alphabet {
            if r.gen_bool(0.4) {
                w.insert(s.clone(), r.gen_range(1..=5));
            }
        }
        let got = member(&w, &e).unwrap().verdict;
        let expected = DefOracle::default().member(&e, &w);
        check(&mut out, got == expected, || format!("{e} on {w}: got {got}"));
    }
    out
}

fn inter1_agreement() -> Outcome {
    let mut out = Outcome::default();
    let mut r = rng(202);
    let alphabet = symbols(5);
    for i in 0..500 {
        let e0 = random_rbe1(&mut r, &alphabet, 1 + i % 4);
        let mut syms = alphabet.clone();
        rand::seq::SliceRandom::shuffle(&mut syms[..], &mut r);
        syms.truncate(r.gen_range(1..=5));
        let e = Rbe::concat(syms.into_iter().map(|s| Rbe::sym_with(s, random_interval(&mut r))).collect());
        let oracle = inter1_oracle(&e0, &e);
        let flow = inter1_flow(&e0, &e).unwrap();
        let ilp = inter1_ilp(&e0, &e, IlpConfig::default()).unwrap();
        check(&mut out, flow == oracle && ilp == oracle, || format!("{:?} vs {e}: flow {flow}, ilp {ilp}, oracle {oracle}", e0.groups()));
    }
    let groups = |gs: &[&[&str]]| Rbe1::new(gs.iter().map(|g| g.iter().map(|s| s.to_string()).collect()).collect()).unwrap();
    let fig = groups(&[&["a", "c"], &["b", "c"]]);
    let e = parse_plain("a?, b*, c").unwrap();
    check(&mut out, inter1_flow(&fig, &e).unwrap() && inter1_oracle(&fig, &e), || "worked flow instance".into());
    out
}

fn satisfiability() -> Outcome {
    let mut out = Outcome::default();
    let e = parse_plain("(a, a+) & (a, a?, a?)").unwrap();
    let expected = ProductNormalForm::Product(BTreeMap::from([("a".to_string(), Interval::bounded(2, 3))]));
    check(&mut out, normalize_product(&e).ok() == Some(expected), || "normal form".into());
    let mut r = rng(303);
    let alphabet = symbols(4);
    let bags = all_bags(&alphabet, 6);
    for _ in 0..300 {
        let arms = (0..2).map(|_| random_rbe(&mut r, &alphabet, 2, false)).collect();
        let e = Rbe::inter(arms);
        let mut oracle = DefOracle::default();
        let small = bags.iter().any(|w| oracle.member(&e, w));
        for (name, got) in [("ilp", satisfiable_by_ilp(&e, IlpConfig::default())), ("dispatch", rbe_satisfiable(&e))] {
            let agrees = match &got {
                Satisfiability::Sat(w) => oracle.member(&e, w) && (small || w.size() > 6),
                Satisfiability::Unsat => !small,
                Satisfiability::UnknownCapped { .. } => false,
            };
            check(&mut out, agrees, || format!("{name} on {e}: {got:?}, oracle {small}"));
        }
    }
    out
}

fn exact_cover() -> Outcome {
    let mut out = Outcome::default();
    let (g, s) = (fixtures::graph("exact_cover.tsv"), fixtures::schema("exact_cover.shex"));
    let found = brute_force_single(&g, &s).unwrap();
    check(&mut out, found.as_ref().is_some_and(|t| check_s_typing(&g, &s, t)), || "brute force".into());
    let pre = fixtures::pretyping("exact_cover.pretyping", &g, &s);
    let report = flood_extension(&g, &s, &pre, Mode::Single).unwrap();
    check(&mut out, report.is_valid(), || "single-mode flood".into());
    // Nodes the flood leaves untyped are completed by search.
    let mut fixed = PreTyping::new();
    for n in g.nodes() {
        for t in report.typing.types(n) {
            fixed.add(n, t);
        }
    }
    let completed = brute_force_single_lang(&g, &s, Some(&fixed), DEFAULT_BRUTE_CAP).unwrap();
    check(&mut out, completed.is_some_and(|t| check_s_typing(&g, &s, &t)), || "flood typing does not complete".into());
    out
}

/// Undirected simple graphs on `n` nodes, one per isomorphism class.
fn undirected_up_to_iso(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut seen = BTreeMap::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<(usize, usize)>> = None;
        loop {
            let mut mapped: Vec<(usize, usize)> =
                edges.iter().map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b]))).collect();
            mapped.sort();
            if best.as_ref().is_none_or(|b| mapped < *b) {
                best = Some(mapped);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        seen.entry(best.unwrap()).or_insert(edges);
    }
    seen.into_values().collect()
}

fn colourable(n: usize, edges: &[(usize, usize)]) -> bool {
    (0..3u32.pow(n as u32)).any(|code| {
        let colour = |v: usize| code / 3u32.pow(v as u32) % 3;
        edges.iter().all(|&(a, b)| colour(a) != colour(b))
    })
}

fn three_colouring() -> Outcome {
    let mut out = Outcome::default();
    let k3 = Graph::from_triples([("r", "e", "g"), ("r", "e", "b"), ("g", "e", "r"), ("g", "e", "b"), ("b", "e", "r"), ("b", "e", "g")]);
    let schema = homomorphism_schema(&k3).unwrap();
    for n in 1..=5 {
        for edges in undirected_up_to_iso(n) {
            let mut b = Graph::builder();
            for i in 0..n {
                b.add_node(&format!("v{i}"));
            }
            for &(x, y) in &edges {
                b.add_edge(&format!("v{x}"), "e", &format!("v{y}"));
                b.add_edge(&format!("v{y}"), "e", &format!("v{x}"));
            }
            let g = b.build();
            let got = brute_force_single(&g, &schema).unwrap().is_some();
            let expected = colourable(n, &edges);
            check(&mut out, got == expected, || format!("{n} nodes {edges:?}: schema {got}, colouring {expected}"));
        }
    }
    out
}

const THREE_TYPES: &str = "t0 -> a::t1*, b::t2?\nt1 -> b::t0 | a::t2\nt2 -> eps | b::t2";

fn in_single_language<L: shex_core::schema::ShapeLanguage>(g: &Graph, lang: &L) -> bool {
    brute_force_single_lang(g, lang, None, DEFAULT_BRUTE_CAP).unwrap().is_some()
}

fn closure() -> Outcome {
    let mut out = Outcome::default();
    let schema = |t: &str| parse_schema(t).unwrap();
    let pairs = [(SCHEMA_POOL[0], SCHEMA_POOL[1]), (SCHEMA_POOL[2], SCHEMA_POOL[5]), (SCHEMA_POOL[4], THREE_TYPES)];
    let graphs: Vec<Graph> =
        (1..=3).flat_map(|n| graphs_up_to_iso(n, 2).into_iter().map(move |e| small_graph(n, &e))).collect();
    for (i, (left, right)) in pairs.iter().enumerate() {
        let (s1, s2) = (schema(left), schema(right));
        let joint = intersect_schemas(&s1, &s2);
        let (m1, m2, mj) = (Memo::new(&s1), Memo::new(&s2), Memo::new(&joint));
        for g in &graphs {
            let both = in_single_language(g, &m1) && in_single_language(g, &m2);
            let got = in_single_language(g, &mj);
            check(&mut out, both == got, || format!("pair {i}: {}", shex_core::graph::serialize_graph(g)));
        }
    }
    for (i, text) in [SCHEMA_POOL[0], SCHEMA_POOL[2], SCHEMA_POOL[5]].iter().enumerate() {
        let s = schema(text);
        let power = powerset_schema(&s, 3).unwrap();
        let (ms, mp) = (Memo::new(&s), Memo::new(&power));
        for g in &graphs {
            let multi = brute_force_multi_lang(g, &ms, DEFAULT_BRUTE_CAP).unwrap().is_some();
            let single = in_single_language(g, &mp);
            check(&mut out, multi == single, || format!("powerset {i}: {}", shex_core::graph::serialize_graph(g)));
        }
    }
    out
}

fn generator() -> Outcome {
    let mut out = Outcome::default();
    let s = fixtures::schema("bugs.shex");
    let gen = generate_graph(&s, &GenConfig::new(10_000, 11)).unwrap();
    let ratio = gen.graph.edge_count() as f64 / 10_000.0;
    check(&mut out, (4.0..=7.0).contains(&ratio), || format!("triples per node {ratio:.2}"));
    check(&mut out, check_s_typing(&gen.graph, &s, &gen.typing), || "generating typing rejected".into());
    for algo in Algorithm::ALL.into_iter().filter(|&a| a != Algorithm::Brute) {
        let pre = (algo == Algorithm::Flood).then_some(&gen.roots);
        for single in [false, true] {
            let result = if single {
                validate_single(&gen.graph, &s, algo, pre)
            } else {
                validate_multi(&gen.graph, &s, algo, pre)
            };
            match result {
                Ok(report) => check(&mut out, report.is_valid(), || format!("{algo} single={single} rejects")),
                Err(ValidateError::ClassMismatch { .. } | ValidateError::UnsupportedAlgorithm { .. }) => {}
                Err(e) => check(&mut out, false, || format!("{algo} single={single}: {e}")),
            }
        }
    }
    out
}

/// Median validation time per algorithm and size; runs are interleaved so
/// background noise hits every cell alike.
fn median_millis(s: &shex_core::schema::Schema, sizes: &[usize], algos: &[Algorithm], runs: usize) -> BTreeMap<(usize, usize), f64> {
    let mut samples: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for &n in sizes {
        let gen = generate_graph(s, &GenConfig::new(n, 1)).unwrap();
        for run in 0..=runs {
            for (a, &algo) in algos.iter().enumerate() {
                let start = Instant::now();
                let report = validate_multi(&gen.graph, s, algo, Some(&gen.roots)).unwrap();
                let ms = start.elapsed().as_secs_f64() * 1e3;
                assert!(report.is_valid());
                if run > 0 {
                    samples.entry((n, a)).or_default().push(ms);
                }
            }
        }
    }
    samples
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by(f64::total_cmp);
            (k, v[v.len() / 2])
        })
        .collect()
}

fn scaling() -> Outcome {
    let mut out = Outcome::default();
    let sizes = [25_000, 50_000, 100_000, 200_000];
    let algos = [Algorithm::Flood, Algorithm::SRefine];
    let t = median_millis(&fixtures::schema("bugs.shex"), &sizes, &algos, 9);
    for (&(n, a), ms) in &t {
        println!("     {} at {n}: median {ms:.1}ms", algos[a]);
    }
    for (a, algo) in algos.iter().enumerate() {
        for w in sizes.windows(2) {
            let ratio = t[&(w[1], a)] / t[&(w[0], a)];
            check(&mut out, ratio <= 3.0, || format!("{algo} {}→{}: ×{ratio:.2}", w[0], w[1]));
        }
    }
    for &n in &sizes {
        let ratio = t[&(n, 1)] / t[&(n, 0)];
        check(&mut out, ratio <= 3.0, || format!("s-refine/flood at {n}: {ratio:.2}"));
    }
    let sizes = &sizes[..2];
    let t = median_millis(&fixtures::schema("bugs_rbe0.shex"), sizes, &[Algorithm::Refine, Algorithm::Rbe0Refine], 5);
    for &n in sizes {
        let (det, flow) = (t[&(n, 0)], t[&(n, 1)]);
        println!("     refine {det:.1}ms, rbe0-refine {flow:.1}ms at {n} (reduced schema)");
        check(&mut out, flow >= det, || format!("rbe0-refine {flow:.1}ms < refine {det:.1}ms at {n}"));
    }
    out
}

fn unambiguity() -> Outcome {
    let mut out = Outcome::default();
    let typed = |src: &str| {
        parse_plain(src).unwrap().map_symbols(&mut |s: &String| {
            let (l, t) = s.split_once("::").unwrap();
            TypedSymbol::new(l, t)
        })
    };
    let e3 = typed("(a::t1, b::t2) | (a::t3, c::t4)");
    check(&mut out, is_unambiguous(&e3).unwrap(), || "E3 reported ambiguous".into());
    let e2 = typed("a::t1, b::t2*, a::t3, c::t2");
    check(&mut out, !is_unambiguous(&e2).unwrap(), || "E2 reported unambiguous".into());
    let bugs = fixtures::schema("bugs.shex");
    check(&mut out, check_deterministic(&bugs).is_ok(), || "bug schema not deterministic".into());
    for t in bugs.type_ids() {
        if let Definition::Expr(e) = bugs.definition(t) {
            check(&mut out, is_unambiguous(e).unwrap(), || format!("{} ambiguous", bugs.type_name(t)));
        }
    }
    out
}

/// Name, time limit in seconds (0 for none), check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        ("fixture typings", 1, fixtures_typings),
        ("single-occurrence membership vs oracle", 30, sorbe_membership),
        ("INTER1 flow = ILP = brute force", 30, inter1_agreement),
        ("satisfiability normal form and ILP", 60, satisfiability),
        ("refinement maximality", 60, props::maximality),
        ("refinement strategy equivalence", 0, || props::strategy_equivalence(200, 606)),
        ("flood correctness", 0, || props::flood_correctness(200, 707)),
        ("exact cover instance", 1, exact_cover),
        ("3-colourability", 60, three_colouring),
        ("closure under intersection and powerset", 0, closure),
        ("generator", 60, generator),
        ("scaling", 600, scaling),
        ("unambiguity", 5, unambiguity),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let slow = *limit > 0 && elapsed > Duration::from_secs(*limit);
        let pass = outcome.ok() && !slow;
        failed += usize::from(!pass);
        println!(
            "{} {:>2} {name}: {} checked, {} violations, {:.2}s{}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.checked,
            outcome.violations.len(),
            elapsed.as_secs_f64(),
            if slow { format!(" (limit {limit}s)") } else { String::new() },
        );
        for v in &outcome.violations {
            println!("     {}", v.replace('\n', "\n     "));
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
