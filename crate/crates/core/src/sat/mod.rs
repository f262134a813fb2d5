//! Linear encodings of bag languages, an integer feasibility solver, the
//! flow-based INTER₁ test, satisfiability and unambiguity.

mod encode;
mod flow;
mod ilp;
mod linear;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use encode::{encode_free, encode_membership, CountVector, Encoder, Encoding};
pub use flow::{build_flow_network, circulation_exists, FlowArc, FlowNetwork};
pub use ilp::{
    default_cap, ilp_feasible, ilp_feasible_with, IlpConfig, IlpVerdict, Model, DEFAULT_ILP_CAP, DEFAULT_NODE_BUDGET,
};
pub use linear::{LinExpr, LinearSystem, VarId, Variable};

use crate::rbe::{normalize_product, Bag, ClassError, ProductNormalForm, Rbe, Rbe1};
use crate::symbol::{Label, TypedSymbol};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SatError {
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error("search capped at {cap} before reaching completeness bound {bound:?}")]
    Capped { cap: u64, bound: Option<u64> },
    #[error("intersection is not supported here")]
    IntersectionUnsupported,
}

/// Outcome of a satisfiability query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Satisfiability<S: Ord> {
    Sat(Bag<S>),
    Unsat,
    UnknownCapped { cap: u64 },
}

impl<S: Ord> Satisfiability<S> {
    pub fn is_sat(&self) -> bool {
        matches!(self, Satisfiability::Sat(_))
    }
}

/// Unrolling depth for stars over intersections when the target is free.
pub const FREE_UNROLL: u64 = 4;

/// Decides `L(e) ≠ ∅`: normal form for RBE(a^M, ‖, ∩), integer search otherwise.
pub fn rbe_satisfiable<S: Ord + Clone>(e: &Rbe<S>) -> Satisfiability<S> {
    rbe_satisfiable_with(e, IlpConfig::default())
}

pub fn rbe_satisfiable_with<S: Ord + Clone>(e: &Rbe<S>, cfg: IlpConfig) -> Satisfiability<S> {
    if e.is_product_class() {
        return match normalize_product(e) {
            Ok(ProductNormalForm::Product(m)) => {
                Satisfiability::Sat(m.iter().map(|(s, i)| (s.clone(), i.lo().unwrap_or(0))).collect())
            }
            _ => Satisfiability::Unsat,
        };
    }
    satisfiable_by_ilp(e, cfg)
}

/// The general path without the normal-form shortcut.
pub fn satisfiable_by_ilp<S: Ord + Clone>(e: &Rbe<S>, cfg: IlpConfig) -> Satisfiability<S> {
    let enc = encode_free(e, FREE_UNROLL);
    match ilp_feasible_with(&enc.system, cfg) {
        IlpVerdict::Sat(m) => Satisfiability::Sat(enc.decode(&m)),
        IlpVerdict::Unsat if !has_inter_under_iteration(e) => Satisfiability::Unsat,
        IlpVerdict::Unsat | IlpVerdict::UnknownCapped { .. } => Satisfiability::UnknownCapped { cap: cfg.cap },
    }
}

fn has_inter_under_iteration<S: Ord + Clone>(e: &Rbe<S>) -> bool {
    match e {
        Rbe::Star(b) | Rbe::Plus(b) => b.has_inter(),
        Rbe::Epsilon | Rbe::Symbol(..) => false,
        Rbe::Disj(v) | Rbe::Concat(v) | Rbe::Inter(v) => v.iter().any(has_inter_under_iteration),
    }
}

/// Which procedure decided an INTER₁ instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inter1Method {
    Flow,
    Enumeration,
    Ilp,
}

/// Largest number of distinct flattenings tried one by one.
pub const FLATTENING_LIMIT: u64 = 256;

/// Identical groups merged: `(group, multiplicity)`.
fn grouped<S: Ord + Clone>(e0: &Rbe1<S>) -> BTreeMap<&BTreeSet<S>, u64> {
    let mut out = BTreeMap::new();
    for g in e0.groups() {
        *out.entry(g).or_insert(0) += 1;
    }
    out
}

fn multichoose(n: u64, k: u64) -> u64 {
    let mut acc = 1u64;
    for i in 1..=k {
        match acc.checked_mul(n + i - 1) {
            Some(v) => acc = v / i,
            None => return u64::MAX,
        }
    }
    acc
}

/// Number of distinct bags in `L(e0)`, saturating.
pub fn distinct_flattenings<S: Ord + Clone>(e0: &Rbe1<S>) -> u64 {
    grouped(e0).iter().fold(1u64, |acc, (g, &c)| acc.saturating_mul(multichoose(g.len() as u64, c)))
}

/// Bags of size `k` over `items`.
fn bags_of_size<S: Ord + Clone>(items: &[S], k: u64) -> Vec<Bag<S>> {
    match items.split_first() {
        None => if k == 0 { vec![Bag::new()] } else { vec![] },
        Some((first, rest)) => (0..=k)
            .flat_map(|c| {
                bags_of_size(rest, k - c).into_iter().map(move |mut b| {
                    b.insert(first.clone(), c);
                    b
                })
            })
            .collect(),
    }
}

/// Tries every distinct bag of `L(e0)` against `e`.
pub fn inter1_enumerate<S: Ord + Clone>(e0: &Rbe1<S>, e: &Rbe<S>) -> Result<bool, SatError> {
    let mut bags = vec![Bag::new()];
    for (g, c) in grouped(e0) {
        let items: Vec<S> = g.iter().cloned().collect();
        let options = bags_of_size(&items, c);
        bags = bags.iter().flat_map(|b| options.iter().map(move |o| b.union(o))).collect();
    }
    for w in &bags {
        match crate::membership::member(w, e) {
            Ok(m) if m.verdict => return Ok(true),
            Ok(_) => {}
            Err(crate::membership::MembershipError::Capped { cap }) => return Err(SatError::Capped { cap, bound: None }),
            Err(_) => return Err(SatError::IntersectionUnsupported),
        }
    }
    Ok(false)
}

/// Decides `L(e0) ∩ L(e) ≠ ∅`.
pub fn inter1<S: Ord + Clone + fmt::Display>(e0: &Rbe1<S>, e: &Rbe<S>) -> Result<(bool, Inter1Method), SatError> {
    if e.is_product_class() {
        Ok((inter1_flow(e0, e)?, Inter1Method::Flow))
    } else if distinct_flattenings(e0) <= FLATTENING_LIMIT {
        Ok((inter1_enumerate(e0, e)?, Inter1Method::Enumeration))
    } else {
        Ok((inter1_ilp(e0, e, IlpConfig::default())?, Inter1Method::Ilp))
    }
}

pub fn inter1_flow<S: Ord + Clone + fmt::Display>(e0: &Rbe1<S>, e: &Rbe<S>) -> Result<bool, SatError> {
    Ok(circulation_exists(&build_flow_network(e0, e)?))
}

/// `Ψ_{e0} ∧ Ψ_e` over a shared counting vector, searched up to `|e0| + 1`.
pub fn inter1_ilp<S: Ord + Clone>(e0: &Rbe1<S>, e: &Rbe<S>, cfg: IlpConfig) -> Result<bool, SatError> {
    let k = e0.len() as u64;
    let mut sys = LinearSystem::new();
    {
        let mut enc = Encoder::new(&mut sys, k.max(1));
        let mut alphabet = e0.alphabet();
        alphabet.extend(e.alphabet());
        let x = enc.fresh_counts(&alphabet, "x");
        let one = LinExpr::constant(1);
        enc.encode(&e0.to_rbe(), &x, &one);
        enc.encode(e, &x, &one);
    }
    sys.completeness_bound = Some(k + 1);
    match ilp_feasible_with(&sys, cfg) {
        IlpVerdict::Sat(_) => Ok(true),
        IlpVerdict::Unsat => Ok(false),
        IlpVerdict::UnknownCapped { cap, bound } => Err(SatError::Capped { cap, bound }),
    }
}

/// Unambiguity of an expression over typed symbols: no word with two typed
/// symbols sharing a label, and no two words with the same label projection.
pub fn is_unambiguous(e: &Rbe<TypedSymbol>) -> Result<bool, SatError> {
    is_unambiguous_with(e, IlpConfig::default())
}

pub fn is_unambiguous_with(e: &Rbe<TypedSymbol>, cfg: IlpConfig) -> Result<bool, SatError> {
    if e.has_inter() {
        return Err(SatError::IntersectionUnsupported);
    }
    let alphabet = e.alphabet();
    let mut by_label: BTreeMap<Label, Vec<TypedSymbol>> = BTreeMap::new();
    for s in &alphabet {
        by_label.entry(s.label.clone()).or_default().push(s.clone());
    }
    let shared: Vec<&Vec<TypedSymbol>> = by_label.values().filter(|v| v.len() > 1).collect();
    if shared.is_empty() {
        return Ok(true);
    }
    let decide = |sys: &LinearSystem| match ilp_feasible_with(sys, cfg) {
        IlpVerdict::Sat(_) => Ok(true),
        IlpVerdict::Unsat => Ok(false),
        IlpVerdict::UnknownCapped { cap, bound } => Err(SatError::Capped { cap, bound }),
    };
    for group in &shared {
        for (i, s1) in group.iter().enumerate() {
            for s2 in &group[i + 1..] {
                let mut sys = LinearSystem::new();
                let x = encode_into(&mut sys, e, &alphabet, "x");
                sys.at_least(&x[s1], 1, "p");
                sys.at_least(&x[s2], 1, "p");
                if decide(&sys)? {
                    return Ok(false);
                }
            }
        }
        for s in group.iter() {
            let mut sys = LinearSystem::new();
            let x = encode_into(&mut sys, e, &alphabet, "x");
            let y = encode_into(&mut sys, e, &alphabet, "y");
            for members in by_label.values() {
                let sum = |v: &CountVector<TypedSymbol>| members.iter().fold(LinExpr::zero(), |acc, m| acc.plus(&v[m], 1));
                sys.equate(&sum(&x), &sum(&y));
            }
            sys.at_least(&x[s].clone().minus(&y[s]), 1, "p");
            if decide(&sys)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn encode_into(sys: &mut LinearSystem, e: &Rbe<TypedSymbol>, alphabet: &BTreeSet<TypedSymbol>, base: &str) -> CountVector<TypedSymbol> {
    let mut enc = Encoder::new(sys, FREE_UNROLL);
    let x = enc.fresh_counts(alphabet, base);
    enc.encode(e, &x, &LinExpr::constant(1));
    x
}
