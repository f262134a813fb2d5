use std::collections::{BTreeSet, HashMap};

use super::{Schema, SchemaError, ShapeLanguage, TypeId};
use crate::graph::Graph;
use crate::rbe::{Bag, Interval, Rbe};
use crate::symbol::{Label, TypeName, TypedSymbol};

/// Types are pairs `(t1,t2)`; a bag is accepted when both aggregating
/// projections are accepted by the component types.
#[derive(Clone, Debug)]
pub struct IntersectionSchema {
    left: Schema,
    right: Schema,
    pairs: Vec<(TypeId, TypeId)>,
    names: Vec<TypeName>,
    lookup: HashMap<TypeName, usize>,
}

pub fn intersect_schemas(left: &Schema, right: &Schema) -> IntersectionSchema {
    let mut pairs = Vec::new();
    let mut names = Vec::new();
    for a in left.type_ids() {
        for b in right.type_ids() {
            pairs.push((a, b));
            names.push(TypeName::new(format!("({},{})", left.type_name(a), right.type_name(b))));
        }
    }
    let lookup = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    IntersectionSchema { left: left.clone(), right: right.clone(), pairs, names, lookup }
}

impl IntersectionSchema {
    pub fn pair(&self, i: usize) -> (TypeId, TypeId) {
        self.pairs[i]
    }

    pub fn index_of(&self, left: TypeId, right: TypeId) -> usize {
        left.index() * self.right.type_count() + right.index()
    }

    /// Both projections of `w`, or `None` if a symbol names no pair type.
    pub fn projections(&self, w: &Bag<TypedSymbol>) -> Option<(Bag<TypedSymbol>, Bag<TypedSymbol>)> {
        let mut l = Bag::new();
        let mut r = Bag::new();
        for (sym, &c) in w.iter() {
            let &(a, b) = self.pairs.get(*self.lookup.get(&sym.ty)?)?;
            l.insert(TypedSymbol { label: sym.label.clone(), ty: self.left.type_name(a).clone() }, c);
            r.insert(TypedSymbol { label: sym.label.clone(), ty: self.right.type_name(b).clone() }, c);
        }
        Some((l, r))
    }
}

impl ShapeLanguage for IntersectionSchema {
    fn type_count(&self) -> usize {
        self.pairs.len()
    }

    fn type_name(&self, i: usize) -> TypeName {
        self.names[i].clone()
    }

    fn accepts(&self, i: usize, w: &Bag<TypedSymbol>) -> bool {
        let (a, b) = self.pairs[i];
        match self.projections(w) {
            Some((l, r)) => self.left.accepts_bag(a, &l) && self.right.accepts_bag(b, &r),
            None => false,
        }
    }
}

/// Types are the non-empty subsets of the base types, named `{t1,t2}`.
#[derive(Clone, Debug)]
pub struct PowersetSchema {
    base: Schema,
    subsets: Vec<Vec<TypeId>>,
    names: Vec<TypeName>,
    lookup: HashMap<TypeName, usize>,
}

pub fn powerset_schema(base: &Schema, bound: usize) -> Result<PowersetSchema, SchemaError> {
    let size = base.type_count();
    if size > bound {
        return Err(SchemaError::CarrierTooLarge { size, bound });
    }
    let mut subsets = Vec::new();
    let mut names = Vec::new();
    for mask in 1u64..(1 << size) {
        let members: Vec<TypeId> = (0..size as u32).filter(|i| mask >> i & 1 == 1).map(TypeId).collect();
        let inner: Vec<&str> = members.iter().map(|&t| base.type_name(t).as_str()).collect();
        names.push(TypeName::new(format!("{{{}}}", inner.join(","))));
        subsets.push(members);
    }
    let lookup = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    Ok(PowersetSchema { base: base.clone(), subsets, names, lookup })
}

impl PowersetSchema {
    pub fn subset(&self, i: usize) -> &[TypeId] {
        &self.subsets[i]
    }

    pub fn index_of(&self, types: &BTreeSet<TypeId>) -> Option<usize> {
        let mask: u64 = types.iter().map(|t| 1u64 << t.0).sum();
        (mask != 0).then(|| mask as usize - 1)
    }
}

struct JointSearch<'a> {
    base: &'a Schema,
    target: &'a [TypeId],
    /// One entry per bag element: label, allowed types, same as previous element.
    items: Vec<(Label, &'a [TypeId], bool)>,
    bags: Vec<Bag<TypedSymbol>>,
}

impl JointSearch<'_> {
    fn tuple_count(&self, allowed: &[TypeId]) -> usize {
        allowed.len().pow(self.target.len() as u32)
    }

    fn run(&mut self, pos: usize, min_code: usize) -> bool {
        if pos == self.items.len() {
            return self.target.iter().zip(&self.bags).all(|(&t, w)| self.base.accepts_bag(t, w));
        }
        let (label, allowed, repeat) = self.items[pos].clone();
        let start = if repeat { min_code } else { 0 };
        for code in start..self.tuple_count(allowed) {
            let mut rest = code;
            for i in 0..self.target.len() {
                let ty = allowed[rest % allowed.len()];
                rest /= allowed.len();
                self.bags[i].insert(TypedSymbol { label: label.clone(), ty: self.base.type_name(ty).clone() }, 1);
            }
            let found = self.run(pos + 1, code);
            rest = code;
            for i in 0..self.target.len() {
                let ty = allowed[rest % allowed.len()];
                rest /= allowed.len();
                let sym = TypedSymbol { label: label.clone(), ty: self.base.type_name(ty).clone() };
                let left = self.bags[i].count(&sym) - 1;
                self.bags[i] = remove_one(&self.bags[i], &sym, left);
            }
            if found {
                return true;
            }
        }
        false
    }
}

fn remove_one(w: &Bag<TypedSymbol>, sym: &TypedSymbol, left: u64) -> Bag<TypedSymbol> {
    w.iter()
        .filter(|(s, _)| *s != sym)
        .map(|(s, &c)| (s.clone(), c))
        .chain((left > 0).then(|| (sym.clone(), left)))
        .collect()
}

impl ShapeLanguage for PowersetSchema {
    fn type_count(&self) -> usize {
        self.subsets.len()
    }

    fn type_name(&self, i: usize) -> TypeName {
        self.names[i].clone()
    }

    /// Searches one type tuple per bag element, drawn from the element's
    /// subset, whose coordinate projections are accepted.
    fn accepts(&self, i: usize, w: &Bag<TypedSymbol>) -> bool {
        let target = &self.subsets[i];
        let mut items = Vec::new();
        for (sym, &c) in w.iter() {
            let Some(&j) = self.lookup.get(&sym.ty) else { return false };
            for k in 0..c {
                items.push((sym.label.clone(), self.subsets[j].as_slice(), k > 0));
            }
        }
        let mut search = JointSearch { base: &self.base, target, items, bags: vec![Bag::new(); target.len()] };
        search.run(0, 0)
    }
}

/// One type per node of `h`; node `n` gets `(a1::m1)*, …` over its out-edges.
pub fn homomorphism_schema(h: &Graph) -> Result<Schema, SchemaError> {
    let rules = h
        .nodes()
        .map(|n| {
            let parts: BTreeSet<(Label, TypeName)> =
                h.out_edges(n).iter().map(|&(l, m)| (h.label(l).clone(), TypeName::new(h.node_name(m)))).collect();
            let body = Rbe::concat(
                parts.into_iter().map(|(label, ty)| Rbe::sym_with(TypedSymbol { label, ty }, Interval::STAR)).collect(),
            );
            (TypeName::new(h.node_name(n)), body)
        })
        .collect();
    Schema::new(rules, Vec::new())
}

/// Membership in the universal language: every bag.
pub fn universal_language_member(_w: &Bag<TypedSymbol>) -> bool {
    true
}
