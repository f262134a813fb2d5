use std::fmt;

/// Upper end of an interval; `None` is unbounded.
pub type Upper = Option<u64>;

/// A set of naturals `[lo; hi]`, possibly unbounded above, or the empty set.
///
/// Every pair with `lo > hi` collapses to the single canonical empty value,
/// so structural equality is set equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval(Option<(u64, Upper)>);

impl Interval {
    pub const EMPTY: Interval = Interval(None);
    pub const ONE: Interval = Interval(Some((1, Some(1))));
    pub const ZERO: Interval = Interval(Some((0, Some(0))));
    pub const OPT: Interval = Interval(Some((0, Some(1))));
    pub const STAR: Interval = Interval(Some((0, None)));
    pub const PLUS: Interval = Interval(Some((1, None)));

    pub fn new(lo: u64, hi: Upper) -> Self {
        match hi {
            Some(h) if h < lo => Self::EMPTY,
            _ => Interval(Some((lo, hi))),
        }
    }

    pub fn bounded(lo: u64, hi: u64) -> Self {
        Self::new(lo, Some(hi))
    }

    pub fn point(k: u64) -> Self {
        Self::new(k, Some(k))
    }

    pub fn is_empty(self) -> bool {
        self.0.is_none()
    }

    /// Lower bound, `None` for the empty interval.
    pub fn lo(self) -> Option<u64> {
        self.0.map(|(l, _)| l)
    }

    /// Upper bound: `None` when empty, `Some(None)` when unbounded.
    pub fn hi(self) -> Option<Upper> {
        self.0.map(|(_, h)| h)
    }

    pub fn bounds(self) -> Option<(u64, Upper)> {
        self.0
    }

    pub fn contains(self, k: u64) -> bool {
        match self.0 {
            None => false,
            Some((l, h)) => k >= l && h.is_none_or(|h| k <= h),
        }
    }

    pub fn intersect(self, other: Interval) -> Interval {
        match (self.0, other.0) {
            (Some((l1, h1)), Some((l2, h2))) => {
                let hi = match (h1, h2) {
                    (None, h) | (h, None) => h,
                    (Some(a), Some(b)) => Some(a.min(b)),
                };
                Interval::new(l1.max(l2), hi)
            }
            _ => Interval::EMPTY,
        }
    }

    /// Minkowski sum; unbounded absorbs, empty absorbs everything.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Interval) -> Interval {
        match (self.0, other.0) {
            (Some((l1, h1)), Some((l2, h2))) => {
                let hi = match (h1, h2) {
                    (Some(a), Some(b)) => a.checked_add(b),
                    _ => None,
                };
                Interval::new(l1.saturating_add(l2), hi)
            }
            _ => Interval::EMPTY,
        }
    }

    /// Replaces an unbounded upper end with `cap`.
    pub fn capped(self, cap: u64) -> Interval {
        match self.0 {
            Some((l, None)) => Interval::new(l, Some(cap)),
            _ => self,
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "∅"),
            Some((l, Some(h))) => write!(f, "[{l};{h}]"),
            Some((l, None)) => write!(f, "[{l};∞]"),
        }
    }
}
