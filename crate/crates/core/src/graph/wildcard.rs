use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::Graph;
use crate::symbol::Label;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelMatcher {
    Set(BTreeSet<Label>),
    Prefix(String),
    /// Every label no other declaration matches.
    Rest,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WildcardDecl {
    pub name: Label,
    pub matcher: LabelMatcher,
}

impl WildcardDecl {
    fn matches_explicitly(&self, label: &Label) -> bool {
        match &self.matcher {
            LabelMatcher::Set(s) => s.contains(label),
            LabelMatcher::Prefix(p) => label.as_str().starts_with(p.as_str()),
            LabelMatcher::Rest => false,
        }
    }
}

impl fmt::Display for WildcardDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wildcard {} = ", self.name)?;
        match &self.matcher {
            LabelMatcher::Set(s) => {
                let items: Vec<&str> = s.iter().map(Label::as_str).collect();
                write!(f, "{{ {} }}", items.join(", "))
            }
            LabelMatcher::Prefix(p) => write!(f, "prefix \"{p}\""),
            LabelMatcher::Rest => write!(f, "rest"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WildcardError {
    #[error("wildcards `{0}` and `{1}` overlap")]
    Overlap(Label, Label),
    #[error("more than one `rest` wildcard")]
    SeveralRest,
    #[error("label `{0}` is matched by no wildcard")]
    UnmatchedLabel(Label),
}

fn overlap(a: &LabelMatcher, b: &LabelMatcher) -> bool {
    use LabelMatcher::*;
    match (a, b) {
        (Set(x), Set(y)) => x.intersection(y).next().is_some(),
        (Prefix(p), Prefix(q)) => p.starts_with(q.as_str()) || q.starts_with(p.as_str()),
        (Set(x), Prefix(p)) | (Prefix(p), Set(x)) => x.iter().any(|l| l.as_str().starts_with(p.as_str())),
        (Rest, _) | (_, Rest) => false,
    }
}

pub fn check_disjoint(decls: &[WildcardDecl]) -> Result<(), WildcardError> {
    if decls.iter().filter(|d| d.matcher == LabelMatcher::Rest).count() > 1 {
        return Err(WildcardError::SeveralRest);
    }
    for (i, a) in decls.iter().enumerate() {
        for b in &decls[i + 1..] {
            if a.name == b.name || overlap(&a.matcher, &b.matcher) {
                return Err(WildcardError::Overlap(a.name.clone(), b.name.clone()));
            }
        }
    }
    Ok(())
}

/// Replaces each edge label by the name of the unique declaration matching it.
pub fn relabel_wildcards(g: &Graph, decls: &[WildcardDecl]) -> Result<Graph, WildcardError> {
    check_disjoint(decls)?;
    let rest = decls.iter().find(|d| d.matcher == LabelMatcher::Rest);
    let mut targets = Vec::with_capacity(g.labels().len());
    for l in g.labels() {
        let hit = decls.iter().find(|d| d.matches_explicitly(l)).or(rest);
        match hit {
            Some(d) => targets.push(d.name.clone()),
            None => return Err(WildcardError::UnmatchedLabel(l.clone())),
        }
    }
    let mut it = targets.into_iter();
    Ok(g.map_labels(|_| it.next().expect("one target per label")))
}
