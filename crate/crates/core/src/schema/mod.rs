//! Schemas: a set of types, one bag expression per type, optional label
//! wildcards, plus the schema algebra used by the closure results.

mod algebra;
mod parse;

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use algebra::{
    homomorphism_schema, intersect_schemas, powerset_schema, universal_language_member, IntersectionSchema, PowersetSchema,
};
pub use parse::{parse_schema, SchemaParseError};

use crate::graph::{check_disjoint, relabel_wildcards, Graph, LabelMatcher, WildcardDecl, WildcardError};
use crate::membership::member;
use crate::rbe::{Bag, RawSymbol, Rbe};
use crate::symbol::{Label, TypeName, TypedSymbol, TOP};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TypeId(pub u32);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definition {
    /// The reserved universal type: every neighbourhood is accepted.
    Universal,
    Expr(Rbe<TypedSymbol>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SchemaClasses {
    pub deterministic: bool,
    pub sorbe: bool,
    pub rbe0: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("`{0}` is reserved for the universal type")]
    ReservedName(TypeName),
    #[error("type `{0}` is defined twice")]
    DuplicateType(TypeName),
    #[error(transparent)]
    Wildcard(#[from] WildcardError),
    #[error("powerset carrier has {size} types, above the bound {bound}")]
    CarrierTooLarge { size: usize, bound: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("type `{ty}` uses label `{label}` with several types")]
pub struct NondeterminismError {
    pub ty: TypeName,
    pub label: Label,
}

/// `δ(t, a)` for a deterministic schema.
#[derive(Clone, Debug, Default)]
pub struct Successors {
    per_type: Vec<BTreeMap<Label, TypeId>>,
}

impl Successors {
    pub fn get(&self, t: TypeId, a: &Label) -> Option<TypeId> {
        self.per_type[t.index()].get(a).copied()
    }

    pub fn of(&self, t: TypeId) -> &BTreeMap<Label, TypeId> {
        &self.per_type[t.index()]
    }
}

#[derive(Clone, Debug)]
pub struct Schema {
    types: Vec<TypeName>,
    index: HashMap<TypeName, TypeId>,
    defs: Vec<Definition>,
    wildcards: Vec<WildcardDecl>,
    classes: SchemaClasses,
}

impl Schema {
    /// Types referenced without a rule get `ε`; `TOP` becomes universal.
    pub fn new(rules: Vec<(TypeName, Rbe<TypedSymbol>)>, wildcards: Vec<WildcardDecl>) -> Result<Schema, SchemaError> {
        let mut s = Schema { types: Vec::new(), index: HashMap::new(), defs: Vec::new(), wildcards, classes: SchemaClasses::default() };
        let mut defined = BTreeSet::new();
        for (name, _) in &rules {
            if name.as_str() == TOP {
                return Err(SchemaError::ReservedName(name.clone()));
            }
            if !defined.insert(name.clone()) {
                return Err(SchemaError::DuplicateType(name.clone()));
            }
            s.intern(name);
        }
        for (_, e) in &rules {
            e.visit_symbols(&mut |sym, _| {
                s.intern(&sym.ty);
            });
        }
        let mut bodies: HashMap<TypeName, Rbe<TypedSymbol>> = rules.into_iter().collect();
        s.defs = s
            .types
            .iter()
            .map(|t| match bodies.remove(t) {
                Some(e) => Definition::Expr(e),
                None if t.as_str() == TOP => Definition::Universal,
                None => Definition::Expr(Rbe::Epsilon),
            })
            .collect();
        check_disjoint(&s.effective_wildcards())?;
        s.classes = classify(&s);
        Ok(s)
    }

    fn intern(&mut self, name: &TypeName) -> TypeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = TypeId(self.types.len() as u32);
        self.types.push(name.clone());
        self.index.insert(name.clone(), id);
        id
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn type_ids(&self) -> impl Iterator<Item = TypeId> {
        (0..self.types.len() as u32).map(TypeId)
    }

    pub fn type_name(&self, t: TypeId) -> &TypeName {
        &self.types[t.index()]
    }

    pub fn type_id(&self, name: &str) -> Option<TypeId> {
        self.index.get(&TypeName::new(name)).copied()
    }

    pub fn definition(&self, t: TypeId) -> &Definition {
        &self.defs[t.index()]
    }

    pub fn is_universal(&self, t: TypeId) -> bool {
        self.defs[t.index()] == Definition::Universal
    }

    pub fn top(&self) -> Option<TypeId> {
        self.type_id(TOP).filter(|&t| self.is_universal(t))
    }

    pub fn wildcards(&self) -> &[WildcardDecl] {
        &self.wildcards
    }

    pub fn classes(&self) -> SchemaClasses {
        self.classes
    }

    /// Labels used in the rules, wildcard names included.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        for d in &self.defs {
            if let Definition::Expr(e) = d {
                e.visit_symbols(&mut |s, _| {
                    out.insert(s.label.clone());
                });
            }
        }
        out
    }

    fn is_wildcard_name(&self, l: &Label) -> bool {
        self.wildcards.iter().any(|w| &w.name == l)
    }

    /// Declared wildcards plus one singleton per plain label of the rules;
    /// empty when no wildcard is declared.
    pub fn effective_wildcards(&self) -> Vec<WildcardDecl> {
        if self.wildcards.is_empty() {
            return Vec::new();
        }
        let mut out = self.wildcards.clone();
        for l in self.labels() {
            if !self.is_wildcard_name(&l) {
                out.push(WildcardDecl { name: l.clone(), matcher: LabelMatcher::Set(BTreeSet::from([l])) });
            }
        }
        out
    }

    /// The graph as the schema sees it, after wildcard relabelling.
    pub fn relabel<'g>(&self, g: &'g Graph) -> Result<Cow<'g, Graph>, WildcardError> {
        if self.wildcards.is_empty() {
            Ok(Cow::Borrowed(g))
        } else {
            relabel_wildcards(g, &self.effective_wildcards()).map(Cow::Owned)
        }
    }

    /// `w ∈ δ(t)`.
    pub fn accepts_bag(&self, t: TypeId, w: &Bag<TypedSymbol>) -> bool {
        match &self.defs[t.index()] {
            Definition::Universal => true,
            Definition::Expr(e) => member(w, e).map(|m| m.verdict).unwrap_or(false),
        }
    }

    fn display_symbol(&self, s: &TypedSymbol) -> RawSymbol {
        RawSymbol { label: s.label.to_string(), ty: Some(s.ty.to_string()), wildcard: self.is_wildcard_name(&s.label) }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.wildcards {
            writeln!(f, "{w}")?;
        }
        for (t, d) in self.types.iter().zip(&self.defs) {
            if let Definition::Expr(e) = d {
                writeln!(f, "{t} -> {}", e.map_symbols(&mut |s| self.display_symbol(s)))?;
            }
        }
        Ok(())
    }
}

/// `δ(t, a)`, or the first type and label using a label with two types.
pub fn check_deterministic(s: &Schema) -> Result<Successors, NondeterminismError> {
    let mut per_type = Vec::with_capacity(s.type_count());
    for t in s.type_ids() {
        let mut m: BTreeMap<Label, TypeId> = BTreeMap::new();
        if let Definition::Expr(e) = s.definition(t) {
            for sym in e.alphabet() {
                let target = s.index[&sym.ty];
                match m.get(&sym.label) {
                    Some(&prev) if prev != target => {
                        return Err(NondeterminismError { ty: s.type_name(t).clone(), label: sym.label });
                    }
                    _ => {
                        m.insert(sym.label, target);
                    }
                }
            }
        }
        per_type.push(m);
    }
    Ok(Successors { per_type })
}

pub fn classify(s: &Schema) -> SchemaClasses {
    let exprs = || {
        s.defs.iter().filter_map(|d| match d {
            Definition::Expr(e) => Some(e),
            Definition::Universal => None,
        })
    };
    SchemaClasses {
        deterministic: check_deterministic(s).is_ok(),
        sorbe: exprs().all(Rbe::is_sorbe),
        rbe0: exprs().all(Rbe::is_rbe0),
    }
}

/// A schema-like object whose types accept bags of typed symbols.
pub trait ShapeLanguage {
    fn type_count(&self) -> usize;
    fn type_name(&self, i: usize) -> TypeName;
    fn accepts(&self, i: usize, w: &Bag<TypedSymbol>) -> bool;
}

impl ShapeLanguage for Schema {
    fn type_count(&self) -> usize {
        self.types.len()
    }

    fn type_name(&self, i: usize) -> TypeName {
        self.types[i].clone()
    }

    fn accepts(&self, i: usize, w: &Bag<TypedSymbol>) -> bool {
        self.accepts_bag(TypeId(i as u32), w)
    }
}
