//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shex_core::rbe::{Bag, Interval, Rbe, Rbe1};

pub type Sym = String;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bag(items: &[&str]) -> Bag<Sym> {
    items.iter().map(|s| s.to_string()).collect()
}

fn difference(w: &Bag<Sym>, u: &Bag<Sym>) -> Bag<Sym> {
    w.iter().map(|(s, &c)| (s.clone(), c - u.count(s))).collect()
}

/// Every sub-bag of `w`.
pub fn sub_bags(w: &Bag<Sym>) -> Vec<Bag<Sym>> {
    let mut out = vec![Bag::new()];
    for (s, &c) in w.iter() {
        out = out
            .iter()
            .flat_map(|b| (0..=c).map(move |k| b.union(&Bag::singleton(s.clone(), k))))
            .collect();
    }
    out
}

/// Every bag over `alphabet` with at most `max` elements.
pub fn all_bags(alphabet: &[Sym], max: u64) -> Vec<Bag<Sym>> {
    let mut out = vec![Bag::new()];
    for s in alphabet {
        out = out
            .iter()
            .flat_map(|b| {
                let room = max - b.size();
                (0..=room).map(move |k| b.union(&Bag::singleton(s.clone(), k)))
            })
            .collect();
    }
    out
}

/// Membership straight from the definition of the bag semantics.
pub fn def_member(e: &Rbe<Sym>, w: &Bag<Sym>) -> bool {
    match e {
        Rbe::Epsilon => w.is_empty(),
        Rbe::Symbol(a, i) => w.iter().all(|(s, _)| s == a) && i.contains(w.count(a)),
        Rbe::Disj(v) => v.iter().any(|x| def_member(x, w)),
        Rbe::Inter(v) => v.iter().all(|x| def_member(x, w)),
        Rbe::Concat(v) => match v.split_first() {
            None => w.is_empty(),
            Some((first, rest)) => {
                let rest = Rbe::Concat(rest.to_vec());
                sub_bags(w).iter().any(|u| def_member(first, u) && def_member(&rest, &difference(w, u)))
            }
        },
        Rbe::Star(b) => {
            w.is_empty()
                || sub_bags(w).iter().any(|u| !u.is_empty() && def_member(b, u) && def_member(e, &difference(w, u)))
        }
        Rbe::Plus(b) => {
            let star = Rbe::Star(b.clone());
            sub_bags(w).iter().any(|u| def_member(b, u) && def_member(&star, &difference(w, u)))
        }
    }
}

/// Non-emptiness of `L(e0) ∩ L(e)` by listing the finite `L(e0)`.
pub fn inter1_oracle(e0: &Rbe1<Sym>, e: &Rbe<Sym>) -> bool {
    e0.language().iter().any(|w| def_member(e, w))
}

const INTERVALS: [(u64, Option<u64>); 9] =
    [(1, Some(1)), (1, Some(1)), (0, Some(1)), (0, None), (1, None), (0, Some(2)), (1, Some(2)), (2, Some(3)), (2, None)];

pub fn random_interval(r: &mut ChaCha8Rng) -> Interval {
    let (lo, hi) = INTERVALS[r.gen_range(0..INTERVALS.len())];
    Interval::new(lo, hi)
}

pub fn symbols(n: usize) -> Vec<Sym> {
    ["a", "b", "c", "d", "f", "g"][..n].iter().map(|s| s.to_string()).collect()
}

/// Random expression; `inter` admits `∩` nodes.
pub fn random_rbe(r: &mut ChaCha8Rng, alphabet: &[Sym], depth: u32, inter: bool) -> Rbe<Sym> {
    if depth == 0 || r.gen_bool(0.3) {
        if r.gen_bool(0.08) {
            return Rbe::Epsilon;
        }
        let s = alphabet.choose(r).unwrap().clone();
        return Rbe::sym_with(s, random_interval(r));
    }
    let pick = r.gen_range(0..if inter { 6 } else { 5 });
    let kids = |r: &mut ChaCha8Rng| (0..r.gen_range(2..=3)).map(|_| random_rbe(r, alphabet, depth - 1, inter)).collect();
    match pick {
        0 | 1 => Rbe::disj(kids(r)),
        2 | 3 => Rbe::concat(kids(r)),
        4 => {
            let body = random_rbe(r, alphabet, depth - 1, inter);
            if r.gen_bool(0.5) { Rbe::star(body) } else { Rbe::plus(body) }
        }
        _ => Rbe::inter(kids(r)),
    }
}

/// Random single-occurrence expression over a subset of `alphabet`.
pub fn random_sorbe(r: &mut ChaCha8Rng, alphabet: &[Sym], depth: u32) -> Rbe<Sym> {
    let mut syms = alphabet.to_vec();
    syms.shuffle(r);
    let keep = r.gen_range(1..=syms.len());
    syms.truncate(keep);
    sorbe_over(r, syms, depth)
}

fn sorbe_over(r: &mut ChaCha8Rng, syms: Vec<Sym>, depth: u32) -> Rbe<Sym> {
    let base = if syms.len() == 1 || depth == 0 {
        let leaves: Vec<Rbe<Sym>> = syms.into_iter().map(|s| Rbe::sym_with(s, random_interval(r))).collect();
        if leaves.len() == 1 {
            leaves.into_iter().next().unwrap()
        } else if r.gen_bool(0.5) {
            Rbe::disj(leaves)
        } else {
            Rbe::concat(leaves)
        }
    } else {
        let parts = r.gen_range(2..=syms.len().min(3));
        let mut groups: Vec<Vec<Sym>> = vec![Vec::new(); parts];
        for (i, s) in syms.into_iter().enumerate() {
            let g = if i < parts { i } else { r.gen_range(0..parts) };
            groups[g].push(s);
        }
        let mut kids: Vec<Rbe<Sym>> = groups.into_iter().map(|g| sorbe_over(r, g, depth - 1)).collect();
        if r.gen_bool(0.1) {
            kids.push(Rbe::Epsilon);
        }
        if r.gen_bool(0.5) { Rbe::disj(kids) } else { Rbe::concat(kids) }
    };
    match r.gen_range(0..6) {
        0 => Rbe::star(base),
        1 => Rbe::plus(base),
        2 => Rbe::opt(base),
        _ => base,
    }
}

/// Random RBE₁ with `groups` groups over `alphabet`.
pub fn random_rbe1(r: &mut ChaCha8Rng, alphabet: &[Sym], groups: usize) -> Rbe1<Sym> {
    let gs = (0..groups)
        .map(|_| {
            let k = r.gen_range(1..=alphabet.len().min(3));
            let mut a = alphabet.to_vec();
            a.shuffle(r);
            a.into_iter().take(k).collect::<BTreeSet<_>>()
        })
        .collect();
    Rbe1::new(gs).unwrap()
}

/// Random bag over `alphabet` with at most `max` elements.
pub fn random_bag(r: &mut ChaCha8Rng, alphabet: &[Sym], max: u64) -> Bag<Sym> {
    let size = r.gen_range(0..=max);
    (0..size).map(|_| alphabet.choose(r).unwrap().clone()).collect()
}

/// Canonical key of a labelled directed graph under node renaming.
pub fn canonical_edges(n: usize, edges: &BTreeSet<(usize, usize, usize)>) -> Vec<(usize, usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<(usize, usize, usize)>> = None;
    loop {
        let mut mapped: Vec<(usize, usize, usize)> = edges.iter().map(|&(s, l, o)| (perm[s], l, perm[o])).collect();
        mapped.sort();
        if best.as_ref().is_none_or(|b| mapped < *b) {
            best = Some(mapped);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

pub fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All graphs on `n` nodes over `labels` labels, one per isomorphism class.
pub fn graphs_up_to_iso(n: usize, labels: usize) -> Vec<BTreeSet<(usize, usize, usize)>> {
    let slots: Vec<(usize, usize, usize)> =
        (0..n).flat_map(|s| (0..labels).flat_map(move |l| (0..n).map(move |o| (s, l, o)))).collect();
    let mut seen = BTreeMap::new();
    for mask in 0u64..(1u64 << slots.len()) {
        let edges: BTreeSet<_> = slots.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let key = canonical_edges(n, &edges);
        seen.entry(key).or_insert(edges);
    }
    seen.into_values().collect()
}

pub mod fixtures {
    use std::path::PathBuf;

    use shex_core::graph::{parse_graph, Graph};
    use shex_core::schema::{parse_schema, Schema};
    use shex_core::validate::{parse_pretyping, PreTyping, STyping};

    pub fn text(name: &str) -> String {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
    }

    pub fn schema(name: &str) -> Schema {
        parse_schema(&text(name)).unwrap()
    }

    pub fn graph(name: &str) -> Graph {
        parse_graph(&text(name)).unwrap()
    }

    pub fn pretyping(name: &str, g: &Graph, s: &Schema) -> PreTyping {
        parse_pretyping(&text(name), g, s).unwrap()
    }

    /// A total single-type typing read from a `node<TAB>type` file.
    pub fn s_typing(name: &str, g: &Graph, s: &Schema) -> STyping {
        let pre = pretyping(name, g, s);
        STyping::new(g.nodes().map(|n| *pre.get(n).unwrap().iter().next().unwrap()).collect())
    }
}

/// Nodes `n0..` (all declared) and labels `a`, `b`, ... from index triples.
pub fn small_graph(n: usize, edges: &BTreeSet<(usize, usize, usize)>) -> shex_core::graph::Graph {
    let mut b = shex_core::graph::Graph::builder();
    for i in 0..n {
        b.add_node(&format!("n{i}"));
    }
    for &(s, l, o) in edges {
        let label = ((b'a' + l as u8) as char).to_string();
        b.add_edge(&format!("n{s}"), &label, &format!("n{o}"));
    }
    b.build()
}

pub mod props;
