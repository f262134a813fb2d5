use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use shex_core::gen::{bench, generate_graph, render_csv, GenConfig, Multiplicities};
use shex_core::graph::{parse_graph, serialize_graph, Graph};
use shex_core::membership::{member, MembershipError};
use shex_core::rbe::{parse_bag_list, parse_plain, Bag, Rbe, Rbe1};
use shex_core::sat::{inter1, inter1_enumerate, inter1_flow, inter1_ilp, is_unambiguous, rbe_satisfiable, IlpConfig, SatError, Satisfiability};
use shex_core::schema::{check_deterministic, parse_schema, Definition, Schema};
use shex_core::symbol::TypedSymbol;
use shex_core::validate::{infer_types, parse_pretyping, serialize_pretyping, validate_multi, validate_single, ValidateError};

use crate::args::*;
use crate::{CliError, Outcome};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(CliError::Usage)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(CliError::Usage)
}

fn load_schema(path: &Path) -> Result<Schema, CliError> {
    parse_schema(&read(path)?).with_context(|| format!("in {}", path.display())).map_err(CliError::Usage)
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    parse_graph(&read(path)?).with_context(|| format!("in {}", path.display())).map_err(CliError::Usage)
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Outcome::Yes
    } else {
        Outcome::No
    }
}

impl From<ValidateError> for CliError {
    fn from(e: ValidateError) -> Self {
        match e {
            ValidateError::Capped { .. } | ValidateError::BruteForceCap { .. } => CliError::Capped(e.into()),
            ValidateError::Sat(SatError::Capped { .. }) => CliError::Capped(e.into()),
            other => CliError::Usage(other.into()),
        }
    }
}

impl From<SatError> for CliError {
    fn from(e: SatError) -> Self {
        match e {
            SatError::Capped { .. } => CliError::Capped(e.into()),
            other => CliError::Usage(other.into()),
        }
    }
}

pub fn validate(a: ValidateArgs, out: &mut String) -> Result<Outcome, CliError> {
    let schema = load_schema(&a.schema)?;
    let graph = load_graph(&a.graph)?;
    let pre = match &a.pretyping {
        Some(p) => Some(parse_pretyping(&read(p)?, &graph, &schema).with_context(|| format!("in {}", p.display())).map_err(CliError::Usage)?),
        None => None,
    };
    let report = match a.mode {
        ModeArg::Multi => validate_multi(&graph, &schema, a.algo, pre.as_ref())?,
        ModeArg::Single => validate_single(&graph, &schema, a.algo, pre.as_ref())?,
    };
    out.push_str(&match a.format {
        Format::Machine => report.render_machine(&graph, &schema, a.emit_typing, a.report_remaining),
        Format::Text => report.render_text(&graph, &schema, a.emit_typing, a.report_remaining),
    });
    Ok(verdict(report.is_valid()))
}

fn rule_deterministic(e: &Rbe<TypedSymbol>) -> bool {
    let mut seen = BTreeMap::new();
    e.alphabet().into_iter().all(|s| *seen.entry(s.label).or_insert(s.ty.clone()) == s.ty)
}

pub fn check(a: CheckArgs, out: &mut String) -> Result<Outcome, CliError> {
    let schema = load_schema(&a.schema)?;
    for t in schema.type_ids() {
        let name = schema.type_name(t);
        let Definition::Expr(e) = schema.definition(t) else {
            let _ = writeln!(out, "TYPE\t{name}\tuniversal");
            continue;
        };
        let mut line = format!(
            "TYPE\t{name}\tdeterministic={}\tsorbe={}\trbe0={}",
            rule_deterministic(e),
            e.is_sorbe(),
            e.is_rbe0()
        );
        if a.unambiguity {
            let v = match is_unambiguous(e) {
                Ok(b) => b.to_string(),
                Err(SatError::Capped { .. }) => "unknown".into(),
                Err(other) => return Err(CliError::Usage(other.into())),
            };
            let _ = write!(line, "\tunambiguous={v}");
        }
        if a.sat {
            let v = match rbe_satisfiable(e) {
                Satisfiability::Sat(_) => "true",
                Satisfiability::Unsat => "false",
                Satisfiability::UnknownCapped { .. } => "unknown",
            };
            let _ = write!(line, "\tsatisfiable={v}");
        }
        let _ = writeln!(out, "{line}");
    }
    let c = schema.classes();
    let _ = writeln!(out, "SCHEMA\tdeterministic={}\tsorbe={}\trbe0={}", c.deterministic, c.sorbe, c.rbe0);
    if let Err(e) = check_deterministic(&schema) {
        let _ = writeln!(out, "NONDETERMINISTIC\t{}\t{}", e.ty, e.label);
    }
    Ok(Outcome::Yes)
}

pub fn find_types(a: FindTypesArgs, out: &mut String) -> Result<Outcome, CliError> {
    let schema = load_schema(&a.schema)?;
    let graph = load_graph(&a.graph)?;
    let typing = infer_types(&graph, &schema)?;
    let mut all_typed = true;
    for n in graph.nodes() {
        let types: Vec<&str> = typing.types(n).map(|t| schema.type_name(t).as_str()).collect();
        let name = graph.node_name(n);
        all_typed &= !types.is_empty();
        let _ = match (a.format, types.is_empty()) {
            (Format::Machine, false) => writeln!(out, "TYPED\t{name}\t{}", types.join(",")),
            (Format::Machine, true) => writeln!(out, "UNTYPED\t{name}"),
            (Format::Text, false) => writeln!(out, "{name} : {}", types.join(", ")),
            (Format::Text, true) => writeln!(out, "{name} : no type"),
        };
    }
    Ok(verdict(all_typed))
}

fn multiplicities(m: &MultiplicityArgs) -> Multiplicities {
    Multiplicities { opt: m.opt, plus: m.plus, star: m.star, interval_span: m.interval_span }
}

fn seed_or_fresh(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let fresh = rand::random();
        eprintln!("seed\t{fresh}");
        fresh
    })
}

pub fn gen(a: GenArgs, out: &mut String) -> Result<Outcome, CliError> {
    let schema = load_schema(&a.schema)?;
    let seed = seed_or_fresh(a.seed);
    let cfg = GenConfig { n_nodes: a.nodes, seed, multiplicities: multiplicities(&a.multiplicities) };
    let generated = generate_graph(&schema, &cfg).map_err(|e| CliError::Usage(e.into()))?;
    let text = serialize_graph(&generated.graph);
    match &a.out {
        Some(p) => write(p, &text)?,
        None => out.push_str(&text),
    }
    if let Some(p) = &a.roots {
        write(p, &serialize_pretyping(&generated.roots, &generated.graph, &schema))?;
    }
    eprintln!("{} nodes, {} triples, {} roots", generated.graph.node_count(), generated.graph.edge_count(), generated.roots.len());
    Ok(Outcome::Yes)
}

pub fn run_bench(a: BenchArgs, out: &mut String) -> Result<Outcome, CliError> {
    let schema = load_schema(&a.schema)?;
    let seed = seed_or_fresh(a.seed);
    let rows = bench(&schema, &a.sizes, &a.algos, a.repeats, seed, multiplicities(&a.multiplicities)).map_err(|e| match e {
        shex_core::gen::BenchError::Validate(v) => CliError::from(v),
        other => CliError::Usage(other.into()),
    })?;
    let csv = render_csv(&rows);
    match &a.csv {
        Some(p) => write(p, &csv)?,
        None => out.push_str(&csv),
    }
    Ok(Outcome::Yes)
}

fn expression(src: &str) -> Result<Rbe<String>, CliError> {
    parse_plain(src).map_err(|e| CliError::Usage(anyhow!("expression: {e}")))
}

/// Reads `(a | b), c` as the groups `{a, b}`, `{c}`.
fn rbe1(src: &str) -> Result<Rbe1<String>, CliError> {
    let not_rbe1 = || CliError::Usage(anyhow!("`{src}` is not a product of symbol disjunctions"));
    let group = |e: &Rbe<String>| -> Option<BTreeSet<String>> {
        match e {
            Rbe::Symbol(s, i) if *i == shex_core::rbe::Interval::ONE => Some(BTreeSet::from([s.clone()])),
            Rbe::Disj(items) => items
                .iter()
                .map(|x| match x {
                    Rbe::Symbol(s, i) if *i == shex_core::rbe::Interval::ONE => Some(s.clone()),
                    _ => None,
                })
                .collect(),
            _ => None,
        }
    };
    let groups = match expression(src)? {
        Rbe::Epsilon => Vec::new(),
        Rbe::Concat(items) => items.iter().map(group).collect::<Option<Vec<_>>>().ok_or_else(not_rbe1)?,
        single => vec![group(&single).ok_or_else(not_rbe1)?],
    };
    Rbe1::new(groups).ok_or_else(not_rbe1)
}

pub fn rbe(cmd: RbeCommand, out: &mut String) -> Result<Outcome, CliError> {
    match cmd {
        RbeCommand::Member { expr, bag } => {
            let e = expression(&expr)?;
            let w: Bag<String> = parse_bag_list(&bag).into_iter().collect();
            match member(&w, &e) {
                Ok(m) => {
                    let _ = writeln!(out, "member\t{}\t{:?}", m.verdict, m.algorithm);
                    Ok(verdict(m.verdict))
                }
                Err(e @ MembershipError::Capped { .. }) => Err(CliError::Capped(e.into())),
                Err(e) => Err(CliError::Usage(e.into())),
            }
        }
        RbeCommand::Sat { expr } => match rbe_satisfiable(&expression(&expr)?) {
            Satisfiability::Sat(w) => {
                let _ = writeln!(out, "sat\t{w}");
                Ok(Outcome::Yes)
            }
            Satisfiability::Unsat => {
                let _ = writeln!(out, "unsat");
                Ok(Outcome::No)
            }
            Satisfiability::UnknownCapped { cap } => Err(CliError::Capped(anyhow!("search capped at {cap}; verdict unknown"))),
        },
        RbeCommand::Inter1 { rbe1: groups, expr, method } => {
            let e0 = rbe1(&groups)?;
            let e = expression(&expr)?;
            let (v, used) = match method {
                Inter1Choice::Auto => {
                    let (v, m) = inter1(&e0, &e)?;
                    (v, format!("{m:?}"))
                }
                Inter1Choice::Flow => (inter1_flow(&e0, &e)?, "Flow".into()),
                Inter1Choice::Enumerate => (inter1_enumerate(&e0, &e)?, "Enumeration".into()),
                Inter1Choice::Ilp => (inter1_ilp(&e0, &e, IlpConfig::default())?, "Ilp".into()),
            };
            let _ = writeln!(out, "nonempty\t{v}\t{used}");
            Ok(verdict(v))
        }
        RbeCommand::Unambiguous { expr } => {
            let e = expression(&expr)?;
            let mut untyped = None;
            let typed = e.map_symbols(&mut |s: &String| match s.split_once("::") {
                Some((l, t)) => TypedSymbol::new(l, t),
                None => {
                    untyped = Some(s.clone());
                    TypedSymbol::new(s.as_str(), "")
                }
            });
            if let Some(s) = untyped {
                return Err(CliError::Usage(anyhow!("symbol `{s}` has no type")));
            }
            let v = is_unambiguous(&typed)?;
            let _ = writeln!(out, "unambiguous\t{v}");
            Ok(verdict(v))
        }
    }
}
