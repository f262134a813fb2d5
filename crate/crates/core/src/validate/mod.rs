//! Typings, validity under single-type and multi-type semantics, the
//! refinement and flooding algorithms, and exhaustive oracles.
//!
//! Every entry point takes the graph as read from disk; wildcard
//! relabelling happens inside.

mod brute;
mod context;
mod flood;
mod refine;
mod report;
mod typing;

use std::collections::BTreeSet;

use thiserror::Error;

pub use brute::{
    brute_force_multi_lang, brute_force_single_lang, for_each_valid_m_typing, is_valid_m_typing_lang,
    out_lab_type_s_lang, DEFAULT_BRUTE_CAP,
};
pub use flood::Mode;
pub use refine::{Init, Strategy};
pub use report::{remaining_edges, Algorithm, Failure, FloodStats, ValidationReport, Verdict};
pub use typing::{parse_pretyping, serialize_pretyping, MTyping, PreTyping, PreTypingParseError, STyping};

use context::Compiled;
use crate::graph::{Graph, NodeId, WildcardError};
use crate::rbe::{Bag, Rbe1};
use crate::sat::SatError;
use crate::schema::Schema;
use crate::symbol::{LabeledTypes, TypedSymbol};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidateError {
    #[error("{what} needs {needs}")]
    ClassMismatch { what: String, needs: &'static str },
    #[error("flood needs a pre-typing when the schema has no TOP type")]
    MissingPreTyping,
    #[error("{algo} is not available in {mode} mode")]
    UnsupportedAlgorithm { algo: Algorithm, mode: &'static str },
    #[error("integer search capped at {cap}; verdict unknown")]
    Capped { cap: u64 },
    #[error("brute-force search space {size} exceeds the cap {cap}")]
    BruteForceCap { size: u128, cap: u128 },
    #[error(transparent)]
    Sat(SatError),
    #[error(transparent)]
    Wildcard(#[from] WildcardError),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("flattening needs a non-empty type set for every symbol")]
pub struct FlattenError;

/// `⦃a::λ(m) | (n,a,m) ∈ E⦄` over the graph's own labels.
pub fn out_lab_type_s(g: &Graph, s: &Schema, lambda: &STyping, n: NodeId) -> Bag<TypedSymbol> {
    g.out_edges(n)
        .iter()
        .map(|&(a, m)| TypedSymbol { label: g.label(a).clone(), ty: s.type_name(lambda.get(m)).clone() })
        .collect()
}

/// `⦃a::λ(m) | (n,a,m) ∈ E⦄` with type sets.
pub fn out_lab_type_m(g: &Graph, s: &Schema, lambda: &MTyping, n: NodeId) -> Bag<LabeledTypes> {
    g.out_edges(n)
        .iter()
        .map(|&(a, m)| LabeledTypes {
            label: g.label(a).clone(),
            types: lambda.types(m).map(|t| s.type_name(t).clone()).collect(),
        })
        .collect()
}

/// `‖_{a::T ∈ w} (|_{t ∈ T} a::t)`.
pub fn flatten(w: &Bag<LabeledTypes>) -> Result<Rbe1<TypedSymbol>, FlattenError> {
    let mut groups = Vec::new();
    for (lt, &c) in w.iter() {
        let group: BTreeSet<TypedSymbol> =
            lt.types.iter().map(|t| TypedSymbol { label: lt.label.clone(), ty: t.clone() }).collect();
        for _ in 0..c {
            groups.push(group.clone());
        }
    }
    Rbe1::new(groups).ok_or(FlattenError)
}

/// Every node's typed neighbourhood is accepted by its type.
pub fn check_s_typing(g: &Graph, s: &Schema, lambda: &STyping) -> bool {
    let Ok(g) = s.relabel(g) else { return false };
    g.nodes().all(|n| s.accepts_bag(lambda.get(n), &out_lab_type_s(&g, s, lambda, n)))
}

pub fn refine_step(g: &Graph, s: &Schema, lambda: &MTyping, strategy: Strategy) -> Result<MTyping, ValidateError> {
    refine::refine_step(&Compiled::new(g, s)?, lambda, strategy)
}

/// The fixpoint and the number of rounds it took.
pub fn refine_fixpoint(g: &Graph, s: &Schema, init: Init, strategy: Strategy) -> Result<(MTyping, usize), ValidateError> {
    refine::refine_fixpoint(&Compiled::new(g, s)?, init, strategy)
}

/// The ⊑-maximal valid m-typing, with `∅` where nothing survives.
pub fn infer_types(g: &Graph, s: &Schema) -> Result<MTyping, ValidateError> {
    let ctx = Compiled::new(g, s)?;
    Ok(refine::refine_fixpoint(&ctx, Init::FullGamma, refine::default_strategy(&ctx))?.0)
}

pub fn brute_force_single(g: &Graph, s: &Schema) -> Result<Option<STyping>, ValidateError> {
    brute_force_single_lang(&*s.relabel(g)?, s, None, DEFAULT_BRUTE_CAP)
}

pub fn brute_force_multi(g: &Graph, s: &Schema) -> Result<Option<MTyping>, ValidateError> {
    brute_force_multi_lang(&*s.relabel(g)?, s, DEFAULT_BRUTE_CAP)
}

fn wildcard_failure(g: &Graph, s: &Schema, algorithm: Algorithm, mode: Mode, err: WildcardError) -> Result<ValidationReport, ValidateError> {
    let WildcardError::UnmatchedLabel(label) = &err else { return Err(err.into()) };
    let node = g.edges().find(|&(_, l, _)| g.label(l) == label).map(|(n, _, _)| n).unwrap_or(NodeId(0));
    let typing = MTyping::empty(g.node_count(), s.type_count());
    Ok(ValidationReport {
        verdict: Verdict::Invalid,
        algorithm,
        mode,
        remaining: remaining_edges(g, s, &typing),
        typing,
        failures: vec![Failure { node, ty: None, reason: err.to_string() }],
        iterations: 0,
        flood: None,
    })
}

fn report_from_typing(g: &Graph, s: &Schema, algorithm: Algorithm, mode: Mode, typing: MTyping, iterations: usize) -> ValidationReport {
    let failures: Vec<Failure> = g
        .nodes()
        .filter(|&n| typing.is_empty_at(n))
        .map(|node| Failure { node, ty: None, reason: "no type survives".into() })
        .collect();
    ValidationReport {
        verdict: if failures.is_empty() { Verdict::Valid } else { Verdict::Invalid },
        algorithm,
        mode,
        remaining: remaining_edges(g, s, &typing),
        typing,
        failures,
        iterations,
        flood: None,
    }
}

/// Multi-type validation: valid iff every node keeps at least one type
/// (for flood: iff the extension of `pre` succeeds).
pub fn validate_multi(g: &Graph, s: &Schema, algo: Algorithm, pre: Option<&PreTyping>) -> Result<ValidationReport, ValidateError> {
    if algo == Algorithm::Flood {
        return flood_or_top(g, s, pre, Mode::Multi);
    }
    let ctx = match Compiled::new(g, s) {
        Ok(ctx) => ctx,
        Err(e) => return wildcard_failure(g, s, algo, Mode::Multi, e),
    };
    let (init, strategy) = match algo {
        Algorithm::Refine => (Init::FullGamma, refine::default_strategy(&ctx)),
        Algorithm::SRefine => (Init::StructureFiltered, Strategy::Structure),
        Algorithm::Rbe0Refine => (Init::StructureFiltered, Strategy::Flow),
        Algorithm::Brute => {
            let typing = brute_force_multi_lang(&ctx.graph, s, DEFAULT_BRUTE_CAP)?
                .unwrap_or_else(|| MTyping::empty(g.node_count(), s.type_count()));
            return Ok(report_from_typing(g, s, algo, Mode::Multi, typing, 0));
        }
        Algorithm::Flood => unreachable!("handled above"),
    };
    let (typing, rounds) = refine::refine_fixpoint(&ctx, init, strategy).map_err(|e| match e {
        ValidateError::ClassMismatch { needs, .. } => ValidateError::ClassMismatch { what: algo.to_string(), needs },
        other => other,
    })?;
    Ok(report_from_typing(g, s, algo, Mode::Multi, typing, rounds))
}

/// Single-type validation by exhaustive search or single-type flooding.
/// A pre-typing restricts the brute-force search to the given types.
pub fn validate_single(g: &Graph, s: &Schema, algo: Algorithm, pre: Option<&PreTyping>) -> Result<ValidationReport, ValidateError> {
    match algo {
        Algorithm::Flood => flood_or_top(g, s, pre, Mode::Single),
        Algorithm::Brute => {
            let relabelled = match s.relabel(g) {
                Ok(r) => r,
                Err(e) => return wildcard_failure(g, s, algo, Mode::Single, e),
            };
            let typing = brute_force_single_lang(&relabelled, s, pre, DEFAULT_BRUTE_CAP)?;
            let mut report = report_from_typing(
                g,
                s,
                algo,
                Mode::Single,
                match &typing {
                    Some(t) => t.to_multi(s.type_count()),
                    None => MTyping::empty(g.node_count(), s.type_count()),
                },
                0,
            );
            if typing.is_none() {
                report.failures = vec![];
                report.verdict = Verdict::Invalid;
            }
            Ok(report)
        }
        other => Err(ValidateError::UnsupportedAlgorithm { algo: other, mode: "single" }),
    }
}

/// Without a pre-typing, flooding is only meaningful when `TOP` exists:
/// nothing is required, and every node is typed `TOP`.
fn flood_or_top(g: &Graph, s: &Schema, pre: Option<&PreTyping>, mode: Mode) -> Result<ValidationReport, ValidateError> {
    if let Some(pre) = pre {
        return flood_extension(g, s, pre, mode);
    }
    let top = s.top().ok_or(ValidateError::MissingPreTyping)?;
    let mut report = flood_extension(g, s, &PreTyping::new(), mode)?;
    for n in g.nodes() {
        report.typing.insert(n, top);
    }
    Ok(report)
}

/// Minimal valid extension of `pre`. Every type reachable from the
/// pre-typed ones must be deterministic and single-occurrence.
pub fn flood_extension(g: &Graph, s: &Schema, pre: &PreTyping, mode: Mode) -> Result<ValidationReport, ValidateError> {
    let ctx = match Compiled::new(g, s) {
        Ok(ctx) => ctx,
        Err(e) => return wildcard_failure(g, s, Algorithm::Flood, mode, e),
    };
    if let Some(t) = ctx.first_unfloodable(pre.iter().map(|(_, t)| t)) {
        return Err(ValidateError::ClassMismatch {
            what: format!("flood (type {} is reachable)", s.type_name(t)),
            needs: "deterministic single-occurrence rules",
        });
    }
    let out = flood::flood(&ctx, pre, mode);
    Ok(ValidationReport {
        verdict: if out.failure.is_none() { Verdict::Valid } else { Verdict::Invalid },
        algorithm: Algorithm::Flood,
        mode,
        remaining: remaining_edges(g, s, &out.typing),
        typing: out.typing,
        failures: out.failure.into_iter().collect(),
        iterations: 1,
        flood: Some(out.stats),
    })
}
