use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::schema::{Schema, TypeId};

/// One type per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct STyping {
    types: Vec<TypeId>,
}

impl STyping {
    pub fn new(types: Vec<TypeId>) -> Self {
        STyping { types }
    }

    pub fn get(&self, n: NodeId) -> TypeId {
        self.types[n.index()]
    }

    pub fn as_slice(&self) -> &[TypeId] {
        &self.types
    }

    pub fn to_multi(&self, type_count: usize) -> MTyping {
        let mut m = MTyping::empty(self.types.len(), type_count);
        for (i, &t) in self.types.iter().enumerate() {
            m.insert(NodeId(i as u32), t);
        }
        m
    }
}

/// A set of types per node, packed densely: bit `n * type_count + t`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MTyping {
    node_count: usize,
    type_count: usize,
    bits: Vec<u64>,
}

impl MTyping {
    pub fn empty(node_count: usize, type_count: usize) -> Self {
        MTyping { node_count, type_count, bits: vec![0; (node_count * type_count).div_ceil(64)] }
    }

    /// Every type at every node.
    pub fn full(node_count: usize, type_count: usize) -> Self {
        let mut m = Self::empty(node_count, type_count);
        m.bits.fill(!0);
        let used = node_count * type_count % 64;
        if let (Some(last), true) = (m.bits.last_mut(), used != 0) {
            *last = (1 << used) - 1;
        }
        m
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn type_count(&self) -> usize {
        self.type_count
    }

    fn slot(&self, n: NodeId, t: TypeId) -> (usize, u64) {
        debug_assert!(t.index() < self.type_count);
        let i = n.index() * self.type_count + t.index();
        (i / 64, 1 << (i % 64))
    }

    pub fn contains(&self, n: NodeId, t: TypeId) -> bool {
        let (w, mask) = self.slot(n, t);
        self.bits[w] & mask != 0
    }

    pub fn insert(&mut self, n: NodeId, t: TypeId) -> bool {
        let (w, mask) = self.slot(n, t);
        let fresh = self.bits[w] & mask == 0;
        self.bits[w] |= mask;
        fresh
    }

    pub fn remove(&mut self, n: NodeId, t: TypeId) {
        let (w, mask) = self.slot(n, t);
        self.bits[w] &= !mask;
    }

    fn all_types(&self) -> impl Iterator<Item = TypeId> {
        (0..self.type_count as u32).map(TypeId)
    }

    pub fn clear(&mut self, n: NodeId) {
        for t in self.all_types() {
            self.remove(n, t);
        }
    }

    pub fn is_empty_at(&self, n: NodeId) -> bool {
        self.types(n).next().is_none()
    }

    pub fn count_at(&self, n: NodeId) -> usize {
        self.types(n).count()
    }

    pub fn types(&self, n: NodeId) -> impl Iterator<Item = TypeId> + '_ {
        self.all_types().filter(move |&t| self.contains(n, t))
    }

    pub fn set_of(&self, n: NodeId) -> BTreeSet<TypeId> {
        self.types(n).collect()
    }

    fn same_shape(&self, other: &MTyping) -> bool {
        self.node_count == other.node_count && self.type_count == other.type_count
    }

    /// Pointwise inclusion.
    pub fn leq(&self, other: &MTyping) -> bool {
        self.same_shape(other) && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Pointwise union.
    pub fn join(&self, other: &MTyping) -> MTyping {
        let mut out = self.clone();
        out.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        out
    }

    /// Pointwise intersection.
    pub fn meet(&self, other: &MTyping) -> MTyping {
        let mut out = self.clone();
        out.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a &= b);
        out
    }

    /// The same typing with `t` removed everywhere.
    pub fn without(&self, t: TypeId) -> MTyping {
        let mut out = self.clone();
        for n in 0..self.node_count {
            out.remove(NodeId(n as u32), t);
        }
        out
    }

    /// At least one type at every node.
    pub fn is_total(&self) -> bool {
        (0..self.node_count).all(|n| !self.is_empty_at(NodeId(n as u32)))
    }

    pub fn same_row(&self, other: &MTyping, n: NodeId) -> bool {
        self.types(n).eq(other.types(n))
    }
}

/// Types fixed in advance for some nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreTyping {
    entries: BTreeMap<NodeId, BTreeSet<TypeId>>,
}

impl PreTyping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, n: NodeId, t: TypeId) {
        self.entries.entry(n).or_default().insert(t);
    }

    pub fn get(&self, n: NodeId) -> Option<&BTreeSet<TypeId>> {
        self.entries.get(&n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, TypeId)> + '_ {
        self.entries.iter().flat_map(|(&n, ts)| ts.iter().map(move |&t| (n, t)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_multi(&self, node_count: usize, type_count: usize) -> MTyping {
        let mut m = MTyping::empty(node_count, type_count);
        for (n, t) in self.iter() {
            m.insert(n, t);
        }
        m
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct PreTypingParseError {
    pub line: usize,
    pub msg: String,
}

/// Reads `node<TAB>type` lines, one pair per line; `#` starts a comment.
pub fn parse_pretyping(text: &str, g: &Graph, s: &Schema) -> Result<PreTyping, PreTypingParseError> {
    let mut pre = PreTyping::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let err = |msg: String| PreTypingParseError { line: i + 1, msg };
        let Some((node, ty)) = line.split_once('\t') else {
            return Err(err("expected `node<TAB>type`".into()));
        };
        let n = g.node_id(node.trim()).ok_or_else(|| err(format!("unknown node `{}`", node.trim())))?;
        let t = s.type_id(ty.trim()).ok_or_else(|| err(format!("unknown type `{}`", ty.trim())))?;
        pre.add(n, t);
    }
    Ok(pre)
}

/// Writes a pre-typing in the format read by [`parse_pretyping`].
pub fn serialize_pretyping(pre: &PreTyping, g: &Graph, s: &Schema) -> String {
    pre.iter().map(|(n, t)| format!("{}\t{}\n", g.node_name(n), s.type_name(t))).collect()
}
