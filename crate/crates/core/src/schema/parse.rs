use std::collections::BTreeSet;

use thiserror::Error;

use super::{Schema, SchemaError};
use crate::graph::{LabelMatcher, WildcardDecl};
use crate::rbe::{parse_rbe, RawSymbol};
use crate::symbol::{Label, TypeName, TypedSymbol};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

fn syntax(line: usize, msg: impl Into<String>) -> SchemaParseError {
    SchemaParseError::Syntax { line, msg: msg.into() }
}

/// Reads `t -> expr` rules and `wildcard NAME = prefix "p" | { a, b } | rest`
/// declarations. A line without `->` continues the previous rule; `#`
/// starts a comment line.
pub fn parse_schema(text: &str) -> Result<Schema, SchemaParseError> {
    let mut statements: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let starts = line.contains("->") || line.starts_with("wildcard ");
        match statements.last_mut() {
            Some((_, cur)) if !starts => {
                cur.push(' ');
                cur.push_str(line);
            }
            None if !starts => return Err(syntax(i + 1, "expected a rule `t -> expr`")),
            _ => statements.push((i + 1, line.to_string())),
        }
    }
    let mut wildcards = Vec::new();
    let mut raw_rules = Vec::new();
    for (line, stmt) in statements {
        if let Some(rest) = stmt.strip_prefix("wildcard ") {
            wildcards.push(parse_wildcard(line, rest)?);
        } else {
            let (name, body) = stmt.split_once("->").expect("rule statements contain `->`");
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(syntax(line, format!("bad type name `{name}`")));
            }
            let e = parse_rbe(body, false).map_err(|e| syntax(line, e.to_string()))?;
            raw_rules.push((line, TypeName::new(name), e));
        }
    }
    let wildcard_names: BTreeSet<&str> = wildcards.iter().map(|w: &WildcardDecl| w.name.as_str()).collect();
    let mut rules = Vec::new();
    for (line, name, e) in raw_rules {
        let mut problem = None;
        let typed = e.map_symbols(&mut |s: &RawSymbol| {
            if s.ty.is_none() {
                problem.get_or_insert_with(|| format!("symbol `{s}` needs a type"));
            } else if s.wildcard && !wildcard_names.contains(s.label.as_str()) {
                problem.get_or_insert_with(|| format!("undeclared wildcard `{}`", s.label));
            } else if !s.wildcard && wildcard_names.contains(s.label.as_str()) {
                problem.get_or_insert_with(|| format!("label `{}` clashes with a wildcard name", s.label));
            }
            TypedSymbol::new(s.label.as_str(), s.ty.clone().unwrap_or_default())
        });
        if let Some(msg) = problem {
            return Err(syntax(line, msg));
        }
        rules.push((name, typed));
    }
    Ok(Schema::new(rules, wildcards)?)
}

fn parse_wildcard(line: usize, rest: &str) -> Result<WildcardDecl, SchemaParseError> {
    let (name, spec) = rest.split_once('=').ok_or_else(|| syntax(line, "wildcard needs `=`"))?;
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(syntax(line, "bad wildcard name"));
    }
    let spec = spec.trim();
    let matcher = if spec == "rest" {
        LabelMatcher::Rest
    } else if let Some(p) = spec.strip_prefix("prefix") {
        let p = p.trim();
        let inner = p
            .strip_prefix('"')
            .and_then(|p| p.strip_suffix('"'))
            .ok_or_else(|| syntax(line, "prefix must be a quoted string"))?;
        LabelMatcher::Prefix(inner.to_string())
    } else if let Some(body) = spec.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        let labels: BTreeSet<Label> = body.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Label::new).collect();
        if labels.is_empty() {
            return Err(syntax(line, "empty label set"));
        }
        LabelMatcher::Set(labels)
    } else {
        return Err(syntax(line, "expected `prefix \"..\"`, `{ .. }` or `rest`"));
    };
    Ok(WildcardDecl { name: Label::new(name), matcher })
}
