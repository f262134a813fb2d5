use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Bag, Interval};

/// Regular bag expression over symbols `S`.
///
/// `Concat` is the unordered concatenation `‖`. Intervals live only on
/// symbols; `Star` and `Plus` wrap compound bodies. Build values through the
/// smart constructors, which keep that shape.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Rbe<S> {
    Epsilon,
    Symbol(S, Interval),
    Disj(Vec<Rbe<S>>),
    Concat(Vec<Rbe<S>>),
    Star(Box<Rbe<S>>),
    Plus(Box<Rbe<S>>),
    Inter(Vec<Rbe<S>>),
}

impl<S: Clone + Ord> Rbe<S> {
    pub fn sym(s: S) -> Self {
        Rbe::Symbol(s, Interval::ONE)
    }

    pub fn sym_with(s: S, interval: Interval) -> Self {
        Rbe::Symbol(s, interval)
    }

    pub fn disj(mut items: Vec<Rbe<S>>) -> Self {
        assert!(!items.is_empty(), "empty disjunction");
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Rbe::Disj(items)
        }
    }

    pub fn concat(mut items: Vec<Rbe<S>>) -> Self {
        match items.len() {
            0 => Rbe::Epsilon,
            1 => items.pop().unwrap(),
            _ => Rbe::Concat(items),
        }
    }

    pub fn inter(mut items: Vec<Rbe<S>>) -> Self {
        assert!(!items.is_empty(), "empty intersection");
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Rbe::Inter(items)
        }
    }

    pub fn star(body: Rbe<S>) -> Self {
        match body {
            Rbe::Epsilon => Rbe::Epsilon,
            Rbe::Symbol(s, i) if i == Interval::ONE => Rbe::Symbol(s, Interval::STAR),
            Rbe::Star(_) => body,
            Rbe::Plus(inner) => Rbe::Star(inner),
            other => Rbe::Star(Box::new(other)),
        }
    }

    /// `E⁺`; a nullable body yields `E*` since the two languages coincide.
    pub fn plus(body: Rbe<S>) -> Self {
        match body {
            Rbe::Symbol(s, i) if i == Interval::ONE => Rbe::Symbol(s, Interval::PLUS),
            b if b.nullable() => Rbe::star(b),
            Rbe::Plus(_) => body,
            other => Rbe::Plus(Box::new(other)),
        }
    }

    pub fn opt(body: Rbe<S>) -> Self {
        match body {
            Rbe::Symbol(s, i) if i == Interval::ONE => Rbe::Symbol(s, Interval::OPT),
            b if b.nullable() => b,
            other => Rbe::Disj(vec![Rbe::Epsilon, other]),
        }
    }

    pub fn nullable(&self) -> bool {
        match self {
            Rbe::Epsilon | Rbe::Star(_) => true,
            Rbe::Symbol(_, i) => i.contains(0),
            Rbe::Disj(v) => v.iter().any(Rbe::nullable),
            Rbe::Concat(v) | Rbe::Inter(v) => v.iter().all(Rbe::nullable),
            Rbe::Plus(b) => b.nullable(),
        }
    }

    pub fn alphabet(&self) -> BTreeSet<S> {
        let mut out = BTreeSet::new();
        self.visit_symbols(&mut |s, _| {
            out.insert(s.clone());
        });
        out
    }

    pub fn visit_symbols<'a>(&'a self, f: &mut impl FnMut(&'a S, Interval)) {
        match self {
            Rbe::Epsilon => {}
            Rbe::Symbol(s, i) => f(s, *i),
            Rbe::Disj(v) | Rbe::Concat(v) | Rbe::Inter(v) => v.iter().for_each(|e| e.visit_symbols(f)),
            Rbe::Star(b) | Rbe::Plus(b) => b.visit_symbols(f),
        }
    }

    pub fn has_inter(&self) -> bool {
        match self {
            Rbe::Inter(_) => true,
            Rbe::Epsilon | Rbe::Symbol(..) => false,
            Rbe::Disj(v) | Rbe::Concat(v) => v.iter().any(Rbe::has_inter),
            Rbe::Star(b) | Rbe::Plus(b) => b.has_inter(),
        }
    }

    /// Single-occurrence: no symbol occurs twice and no intersection.
    pub fn is_sorbe(&self) -> bool {
        if self.has_inter() {
            return false;
        }
        let mut seen = BTreeSet::new();
        let mut ok = true;
        self.visit_symbols(&mut |s, _| ok &= seen.insert(s));
        ok
    }

    /// Member of RBE(a^M, ‖): symbols with intervals under `‖` only.
    pub fn is_rbe0(&self) -> bool {
        match self {
            Rbe::Epsilon | Rbe::Symbol(..) => true,
            Rbe::Concat(v) => v.iter().all(Rbe::is_rbe0),
            _ => false,
        }
    }

    /// Member of RBE(a^M, ‖, ∩).
    pub fn is_product_class(&self) -> bool {
        match self {
            Rbe::Epsilon | Rbe::Symbol(..) => true,
            Rbe::Concat(v) | Rbe::Inter(v) => v.iter().all(Rbe::is_product_class),
            _ => false,
        }
    }

    pub fn map_symbols<T: Clone + Ord>(&self, f: &mut impl FnMut(&S) -> T) -> Rbe<T> {
        match self {
            Rbe::Epsilon => Rbe::Epsilon,
            Rbe::Symbol(s, i) => Rbe::Symbol(f(s), *i),
            Rbe::Disj(v) => Rbe::Disj(v.iter().map(|e| e.map_symbols(f)).collect()),
            Rbe::Concat(v) => Rbe::Concat(v.iter().map(|e| e.map_symbols(f)).collect()),
            Rbe::Inter(v) => Rbe::Inter(v.iter().map(|e| e.map_symbols(f)).collect()),
            Rbe::Star(b) => Rbe::Star(Box::new(b.map_symbols(f))),
            Rbe::Plus(b) => Rbe::Plus(Box::new(b.map_symbols(f))),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Rbe::Epsilon | Rbe::Symbol(..) => 1,
            Rbe::Disj(v) | Rbe::Concat(v) | Rbe::Inter(v) => 1 + v.iter().map(Rbe::size).sum::<usize>(),
            Rbe::Star(b) | Rbe::Plus(b) => 1 + b.size(),
        }
    }
}

/// A `‖` of disjunctions of bare symbols; every member bag has exactly one
/// symbol per group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rbe1<S: Ord> {
    groups: Vec<BTreeSet<S>>,
}

impl<S: Ord + Clone> Rbe1<S> {
    /// Fails when some group is empty.
    pub fn new(groups: Vec<BTreeSet<S>>) -> Option<Self> {
        groups.iter().all(|g| !g.is_empty()).then_some(Rbe1 { groups })
    }

    pub fn groups(&self) -> &[BTreeSet<S>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn alphabet(&self) -> BTreeSet<S> {
        self.groups.iter().flatten().cloned().collect()
    }

    pub fn to_rbe(&self) -> Rbe<S> {
        Rbe::concat(
            self.groups
                .iter()
                .map(|g| Rbe::disj(g.iter().cloned().map(Rbe::sym).collect()))
                .collect(),
        )
    }

    /// All member bags; the count is bounded by the product of group sizes.
    pub fn language(&self) -> BTreeSet<Bag<S>> {
        let mut acc: BTreeSet<Bag<S>> = BTreeSet::from([Bag::new()]);
        for g in &self.groups {
            acc = acc
                .iter()
                .flat_map(|b| g.iter().map(move |s| b.union(&Bag::singleton(s.clone(), 1))))
                .collect();
        }
        acc
    }

    /// Member test by bipartite matching of bag elements to groups.
    pub fn contains(&self, w: &Bag<S>) -> bool {
        if w.size() != self.groups.len() as u64 {
            return false;
        }
        let slots: Vec<&S> = w.iter().flat_map(|(s, &c)| std::iter::repeat_n(s, c as usize)).collect();
        let mut owner: Vec<Option<usize>> = vec![None; slots.len()];
        fn augment<S: Ord>(g: usize, groups: &[BTreeSet<S>], slots: &[&S], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
            for (j, s) in slots.iter().enumerate() {
                if seen[j] || !groups[g].contains(*s) {
                    continue;
                }
                seen[j] = true;
                if owner[j].is_none_or(|h| augment(h, groups, slots, owner, seen)) {
                    owner[j] = Some(g);
                    return true;
                }
            }
            false
        }
        (0..self.groups.len()).all(|g| augment(g, &self.groups, &slots, &mut owner, &mut vec![false; slots.len()]))
    }
}

/// Symbol-wise interval map of an expression in RBE(a^M, ‖, ∩).
pub type ProductForm<S> = BTreeMap<S, Interval>;

fn fmt_interval_suffix(i: Interval, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if i == Interval::ONE {
        Ok(())
    } else if i == Interval::OPT {
        write!(f, "?")
    } else if i == Interval::STAR {
        write!(f, "*")
    } else if i == Interval::PLUS {
        write!(f, "+")
    } else {
        match i.bounds() {
            Some((l, Some(h))) => write!(f, "[{l};{h}]"),
            Some((l, None)) => write!(f, "[{l};*]"),
            None => write!(f, "[1;0]"),
        }
    }
}

impl<S: fmt::Display> Rbe<S> {
    fn level(&self) -> u8 {
        match self {
            Rbe::Inter(_) => 0,
            Rbe::Disj(_) => 1,
            Rbe::Concat(_) => 2,
            _ => 3,
        }
    }

    fn fmt_child(&self, parent: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level() <= parent {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl<S: fmt::Display> fmt::Display for Rbe<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nary = |v: &Vec<Rbe<S>>, sep: &str, lvl: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            for (i, e) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                e.fmt_child(lvl, f)?;
            }
            Ok(())
        };
        match self {
            Rbe::Epsilon => write!(f, "eps"),
            Rbe::Symbol(s, i) => {
                write!(f, "{s}")?;
                fmt_interval_suffix(*i, f)
            }
            Rbe::Disj(v) => nary(v, " | ", 1, f),
            Rbe::Concat(v) => nary(v, ", ", 2, f),
            Rbe::Inter(v) => nary(v, " & ", 0, f),
            Rbe::Star(b) => write!(f, "({b})*"),
            Rbe::Plus(b) => write!(f, "({b})+"),
        }
    }
}
