use std::collections::{btree_map, BTreeMap, BTreeSet};
use std::fmt;

/// A finite multiset with deterministic iteration order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bag<S: Ord> {
    counts: BTreeMap<S, u64>,
}

impl<S: Ord> Default for Bag<S> {
    fn default() -> Self {
        Bag { counts: BTreeMap::new() }
    }
}

impl<S: Ord + Clone> Bag<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(sym: S, count: u64) -> Self {
        let mut b = Self::new();
        b.insert(sym, count);
        b
    }

    pub fn insert(&mut self, sym: S, count: u64) {
        if count > 0 {
            *self.counts.entry(sym).or_insert(0) += count;
        }
    }

    pub fn count(&self, sym: &S) -> u64 {
        self.counts.get(sym).copied().unwrap_or(0)
    }

    /// Total number of elements with multiplicity.
    pub fn size(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn support(&self) -> BTreeSet<S> {
        self.counts.keys().cloned().collect()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, S, u64> {
        self.counts.iter()
    }

    /// Bag union (sum of multiplicities).
    pub fn union(&self, other: &Bag<S>) -> Bag<S> {
        let mut out = self.clone();
        for (s, &c) in other.iter() {
            out.insert(s.clone(), c);
        }
        out
    }

    pub fn restrict(&self, keep: &BTreeSet<S>) -> Bag<S> {
        Bag {
            counts: self
                .counts
                .iter()
                .filter(|(s, _)| keep.contains(*s))
                .map(|(s, &c)| (s.clone(), c))
                .collect(),
        }
    }

    /// `true` when `self ⊆ other` as multisets.
    pub fn is_sub_bag(&self, other: &Bag<S>) -> bool {
        self.iter().all(|(s, &c)| other.count(s) >= c)
    }

    pub fn map<T: Ord + Clone>(&self, mut f: impl FnMut(&S) -> T) -> Bag<T> {
        let mut out = Bag::new();
        for (s, &c) in self.iter() {
            out.insert(f(s), c);
        }
        out
    }
}

impl<S: Ord + Clone> FromIterator<S> for Bag<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut b = Bag::new();
        for s in iter {
            b.insert(s, 1);
        }
        b
    }
}

impl<S: Ord + Clone> FromIterator<(S, u64)> for Bag<S> {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut b = Bag::new();
        for (s, c) in iter {
            b.insert(s, c);
        }
        b
    }
}

impl<S: Ord + fmt::Display> fmt::Display for Bag<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{|")?;
        let mut first = true;
        for (s, &c) in &self.counts {
            for _ in 0..c {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{s}")?;
            }
        }
        write!(f, "|}}")
    }
}

impl<S: Ord + fmt::Debug> fmt::Debug for Bag<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.counts.iter()).finish()
    }
}
