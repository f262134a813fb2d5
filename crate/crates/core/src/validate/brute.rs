//! Exhaustive oracles over any [`ShapeLanguage`]. The graph must already use
//! the language's labels (wildcards relabelled).

use super::typing::{MTyping, PreTyping, STyping};
use super::ValidateError;
use crate::graph::{Graph, NodeId};
use crate::rbe::Bag;
use crate::schema::{ShapeLanguage, TypeId};
use crate::symbol::{TypeName, TypedSymbol};

/// Largest search space the oracles accept by default.
pub const DEFAULT_BRUTE_CAP: u128 = 10_000_000;

/// `ready[k]`: nodes whose own type and successors' types are all fixed
/// once node `k` is assigned.
fn schedule(g: &Graph) -> Vec<Vec<NodeId>> {
    let mut ready = vec![Vec::new(); g.node_count()];
    for n in g.nodes() {
        let last = g.out_edges(n).iter().map(|&(_, m)| m.index()).fold(n.index(), usize::max);
        ready[last].push(n);
    }
    ready
}

fn names<L: ShapeLanguage>(lang: &L) -> Vec<TypeName> {
    (0..lang.type_count()).map(|i| lang.type_name(i)).collect()
}

fn check_size(size: u128, cap: u128) -> Result<(), ValidateError> {
    if size > cap {
        Err(ValidateError::BruteForceCap { size, cap })
    } else {
        Ok(())
    }
}

fn space(choices: impl Iterator<Item = u128>) -> u128 {
    choices.fold(1u128, |acc, c| acc.saturating_mul(c))
}

/// `⦃a::λ(m) | (n,a,m) ∈ E⦄`.
pub fn out_lab_type_s_lang(g: &Graph, names: &[TypeName], assign: &[TypeId], n: NodeId) -> Bag<TypedSymbol> {
    g.out_edges(n)
        .iter()
        .map(|&(a, m)| TypedSymbol { label: g.label(a).clone(), ty: names[assign[m.index()].index()].clone() })
        .collect()
}

/// First valid single-type assignment in lexicographic order, each node
/// restricted to its pre-typed types when `allowed` names it.
pub fn brute_force_single_lang<L: ShapeLanguage>(
    g: &Graph,
    lang: &L,
    allowed: Option<&PreTyping>,
    cap: u128,
) -> Result<Option<STyping>, ValidateError> {
    let all: Vec<TypeId> = (0..lang.type_count() as u32).map(TypeId).collect();
    let domains: Vec<Vec<TypeId>> = g
        .nodes()
        .map(|n| match allowed.and_then(|p| p.get(n)) {
            Some(ts) => ts.iter().copied().collect(),
            None => all.clone(),
        })
        .collect();
    check_size(space(domains.iter().map(|d| d.len() as u128)), cap)?;
    let names = names(lang);
    let ready = schedule(g);
    let mut assign = vec![TypeId(0); g.node_count()];
    fn go<L: ShapeLanguage>(
        k: usize,
        g: &Graph,
        lang: &L,
        names: &[TypeName],
        domains: &[Vec<TypeId>],
        ready: &[Vec<NodeId>],
        assign: &mut [TypeId],
    ) -> bool {
        if k == assign.len() {
            return true;
        }
        for &t in &domains[k] {
            assign[k] = t;
            let ok = ready[k].iter().all(|&n| lang.accepts(assign[n.index()].index(), &out_lab_type_s_lang(g, names, assign, n)));
            if ok && go(k + 1, g, lang, names, domains, ready, assign) {
                return true;
            }
        }
        false
    }
    Ok(go(0, g, lang, &names, &domains, &ready, &mut assign).then(|| STyping::new(assign)))
}

/// Some choice of one type per out-edge, drawn from the target's set,
/// yields a bag accepted by `t`.
fn has_flattening<L: ShapeLanguage>(g: &Graph, lang: &L, names: &[TypeName], sets: &[u64], n: NodeId, t: usize) -> bool {
    let edges = g.out_edges(n);
    let mut bag = Bag::new();
    #[allow(clippy::too_many_arguments)]
    fn go<L: ShapeLanguage>(
        i: usize,
        g: &Graph,
        lang: &L,
        names: &[TypeName],
        sets: &[u64],
        edges: &[(crate::graph::LabelId, NodeId)],
        t: usize,
        bag: &mut Bag<TypedSymbol>,
    ) -> bool {
        let Some(&(a, m)) = edges.get(i) else { return lang.accepts(t, bag) };
        let set = sets[m.index()];
        for u in (0..names.len()).filter(|u| set >> u & 1 == 1) {
            let sym = TypedSymbol { label: g.label(a).clone(), ty: names[u].clone() };
            let mut next = bag.clone();
            next.insert(sym, 1);
            if go(i + 1, g, lang, names, sets, edges, t, &mut next) {
                return true;
            }
        }
        false
    }
    go(0, g, lang, names, sets, edges, t, &mut bag)
}

fn node_valid<L: ShapeLanguage>(g: &Graph, lang: &L, names: &[TypeName], sets: &[u64], n: NodeId) -> bool {
    let set = sets[n.index()];
    (0..names.len()).filter(|t| set >> t & 1 == 1).all(|t| has_flattening(g, lang, names, sets, n, t))
}

fn to_masks(lambda: &MTyping) -> Vec<u64> {
    (0..lambda.node_count())
        .map(|n| lambda.types(NodeId(n as u32)).map(|t| 1u64 << t.0).sum())
        .collect()
}

/// Every `t ∈ λ(n)` has an accepted flattening of the typed neighbourhood.
/// Empty sets are allowed; callers wanting totality check it separately.
pub fn is_valid_m_typing_lang<L: ShapeLanguage>(g: &Graph, lang: &L, lambda: &MTyping) -> bool {
    let names = names(lang);
    let sets = to_masks(lambda);
    g.nodes().all(|n| node_valid(g, lang, &names, &sets, n))
}

/// Calls `f` on every valid m-typing. With `allow_empty`, nodes may get `∅`
/// (the extension-style semantics); otherwise every node gets a type.
pub fn for_each_valid_m_typing<L: ShapeLanguage>(
    g: &Graph,
    lang: &L,
    allow_empty: bool,
    cap: u128,
    mut f: impl FnMut(&MTyping),
) -> Result<(), ValidateError> {
    let k = lang.type_count();
    if k >= 63 {
        return Err(ValidateError::BruteForceCap { size: u128::MAX, cap });
    }
    let first = if allow_empty { 0u64 } else { 1 };
    let per_node = (1u128 << k) - first as u128;
    check_size(space((0..g.node_count()).map(|_| per_node)), cap)?;
    let names = names(lang);
    let ready = schedule(g);
    let mut sets = vec![0u64; g.node_count()];
    #[allow(clippy::too_many_arguments)]
    fn go<L: ShapeLanguage>(
        i: usize,
        first: u64,
        g: &Graph,
        lang: &L,
        names: &[TypeName],
        ready: &[Vec<NodeId>],
        sets: &mut [u64],
        f: &mut dyn FnMut(&MTyping),
    ) {
        if i == sets.len() {
            let mut m = MTyping::empty(sets.len(), names.len());
            for (n, &s) in sets.iter().enumerate() {
                for t in (0..names.len()).filter(|t| s >> t & 1 == 1) {
                    m.insert(NodeId(n as u32), TypeId(t as u32));
                }
            }
            f(&m);
            return;
        }
        for mask in first..(1u64 << names.len()) {
            sets[i] = mask;
            if ready[i].iter().all(|&n| node_valid(g, lang, names, sets, n)) {
                go(i + 1, first, g, lang, names, ready, sets, f);
            }
        }
    }
    go(0, first, g, lang, &names, &ready, &mut sets, &mut f);
    Ok(())
}

/// The join of all valid m-typings, itself valid, or `None` if there is none.
pub fn brute_force_multi_lang<L: ShapeLanguage>(g: &Graph, lang: &L, cap: u128) -> Result<Option<MTyping>, ValidateError> {
    let mut acc: Option<MTyping> = None;
    for_each_valid_m_typing(g, lang, false, cap, |m| {
        acc = Some(match acc.take() {
            Some(a) => a.join(m),
            None => m.clone(),
        });
    })?;
    Ok(acc)
}
