//! Bag membership: the interval algorithm for single-occurrence expressions,
//! a sub-bag table for small bags, and the integer encoding for everything
//! else.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::rbe::{enumerate_language, Bag, EnumerationError, Interval, Rbe};
use crate::sat::{encode_membership, ilp_feasible_with, IlpConfig, IlpVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MembershipAlgorithm {
    SorbeInterval,
    SubBags,
    Ilp,
    Enumeration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipWitness {
    pub verdict: bool,
    /// `I(E)` when the interval algorithm ran.
    pub interval: Option<Interval>,
    pub algorithm: MembershipAlgorithm,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MembershipError {
    #[error("expression is not single-occurrence")]
    NotSorbe,
    #[error("integer search capped at {cap}")]
    Capped { cap: u64 },
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// `I(a^[n;m])` for a symbol occurring `k` times.
fn symbol_interval(k: u64, i: Interval) -> Interval {
    let Some((n, m)) = i.bounds() else {
        return if k == 0 { Interval::ZERO } else { Interval::EMPTY };
    };
    if m == Some(0) {
        return if k == 0 { Interval::STAR } else { Interval::EMPTY };
    }
    let lo = match m {
        None => u64::from(k > 0),
        Some(m) => k.div_ceil(m),
    };
    let hi = k.checked_div(n);
    Interval::new(lo, hi)
}

/// Returns `I(E)` on the bag restricted to `alphabet(E)` and whether that
/// restriction is non-empty.
fn interval_rec<S: Ord + Clone, F: Fn(&S) -> u64>(e: &Rbe<S>, count: &F) -> (Interval, bool) {
    match e {
        Rbe::Epsilon => (Interval::STAR, false),
        Rbe::Symbol(a, i) => {
            let k = count(a);
            (symbol_interval(k, *i), k > 0)
        }
        Rbe::Disj(v) => v.iter().fold((Interval::ZERO, false), |(acc, ne), sub| {
            let (i, n) = interval_rec(sub, count);
            (acc.add(i), ne || n)
        }),
        Rbe::Concat(v) => v.iter().fold((Interval::STAR, false), |(acc, ne), sub| {
            let (i, n) = interval_rec(sub, count);
            (acc.intersect(i), ne || n)
        }),
        Rbe::Star(b) => {
            let (i, ne) = interval_rec(b, count);
            let out = if !ne {
                Interval::STAR
            } else if !i.is_empty() {
                Interval::PLUS
            } else {
                Interval::EMPTY
            };
            (out, ne)
        }
        Rbe::Plus(b) => {
            let (i, ne) = interval_rec(b, count);
            let out = match (ne, i.hi()) {
                (false, _) => Interval::ZERO,
                (true, Some(hi)) => Interval::new(1, hi),
                (true, None) => Interval::EMPTY,
            };
            (out, ne)
        }
        Rbe::Inter(_) => (Interval::EMPTY, false),
    }
}

/// `I(E)`: the set of `i` with `w ∈ L(E)^i`, restricted to `alphabet(E)`.
pub fn sorbe_interval<S: Ord + Clone>(w: &Bag<S>, e: &Rbe<S>) -> Result<Interval, MembershipError> {
    if !e.is_sorbe() {
        return Err(MembershipError::NotSorbe);
    }
    Ok(interval_rec(e, &|s: &S| w.count(s)).0)
}

/// `I(E)` with symbol counts supplied by `count`; `e` must be
/// single-occurrence.
pub fn sorbe_interval_with<S: Ord + Clone>(e: &Rbe<S>, count: &impl Fn(&S) -> u64) -> Interval {
    interval_rec(e, count).0
}

/// Interval membership without the class check; `e` must be single-occurrence.
pub fn member_sorbe_unchecked<S: Ord + Clone>(w: &Bag<S>, e: &Rbe<S>) -> bool {
    let mut covered = true;
    let mut total = 0;
    e.visit_symbols(&mut |s, _| total += w.count(s));
    if total != w.size() {
        covered = false;
    }
    covered && interval_rec(e, &|s: &S| w.count(s)).0.contains(1)
}

pub fn member_sorbe<S: Ord + Clone>(w: &Bag<S>, e: &Rbe<S>) -> Result<MembershipWitness, MembershipError> {
    let interval = sorbe_interval(w, e)?;
    let alphabet = e.alphabet();
    let verdict = interval.contains(1) && w.iter().all(|(s, _)| alphabet.contains(s));
    Ok(MembershipWitness { verdict, interval: Some(interval), algorithm: MembershipAlgorithm::SorbeInterval })
}

/// Membership through `Ψ_E(w)`, exact with the `|w|+1` bound.
pub fn member_general<S: Ord + Clone>(w: &Bag<S>, e: &Rbe<S>) -> Result<MembershipWitness, MembershipError> {
    let enc = encode_membership(e, w);
    let cfg = IlpConfig { cap: w.size() + 1, node_budget: u64::MAX };
    let verdict = match ilp_feasible_with(&enc.system, cfg) {
        IlpVerdict::Sat(_) => true,
        IlpVerdict::Unsat => false,
        IlpVerdict::UnknownCapped { cap, .. } => return Err(MembershipError::Capped { cap }),
    };
    Ok(MembershipWitness { verdict, interval: None, algorithm: MembershipAlgorithm::Ilp })
}

/// Membership by materialising `L(e)` up to `|w|`.
pub fn member_by_enumeration<S: Ord + Clone>(w: &Bag<S>, e: &Rbe<S>) -> Result<MembershipWitness, MembershipError> {
    let lang = enumerate_language(e, w.size())?;
    Ok(MembershipWitness { verdict: lang.contains(w), interval: None, algorithm: MembershipAlgorithm::Enumeration })
}

/// Largest number of sub-bags for which [`member_sub_bags`] is used.
pub const SUB_BAG_LIMIT: u64 = 1024;

/// `∏ (w(a) + 1)`, saturating.
pub fn sub_bag_count<S: Ord + Clone>(w: &Bag<S>) -> u64 {
    w.iter().fold(1u64, |acc, (_, &c)| acc.saturating_mul(c.saturating_add(1)))
}

/// Sub-bags of `w` numbered in mixed radix: digit `k` is the count of the
/// `k`-th support symbol. Sums that stay below `w` add as plain indices.
struct SubBags<'a, S> {
    position: BTreeMap<&'a S, usize>,
    counts: Vec<u64>,
    stride: Vec<usize>,
    digits: Vec<Vec<u64>>,
}

impl<'a, S: Ord + Clone> SubBags<'a, S> {
    fn new(w: &'a Bag<S>) -> Self {
        let counts: Vec<u64> = w.iter().map(|(_, &c)| c).collect();
        let mut stride = Vec::with_capacity(counts.len());
        let mut size = 1usize;
        for &c in &counts {
            stride.push(size);
            size *= c as usize + 1;
        }
        let digits = (0..size)
            .map(|i| counts.iter().zip(&stride).map(|(&c, &st)| (i / st) as u64 % (c + 1)).collect())
            .collect();
        SubBags { position: w.iter().enumerate().map(|(k, (s, _))| (s, k)).collect(), counts, stride, digits }
    }

    fn size(&self) -> usize {
        self.digits.len()
    }

    fn fits(&self, x: usize, y: usize) -> bool {
        self.digits[x].iter().zip(&self.digits[y]).zip(&self.counts).all(|((a, b), c)| a + b <= *c)
    }

    fn sum(&self, xs: &[bool], ys: &[bool]) -> Vec<bool> {
        let mut out = vec![false; self.size()];
        let ys: Vec<usize> = (0..ys.len()).filter(|&j| ys[j]).collect();
        for x in (0..xs.len()).filter(|&i| xs[i]) {
            for &y in &ys {
                if self.fits(x, y) {
                    out[x + y] = true;
                }
            }
        }
        out
    }

    /// Sub-bags of `w` that belong to `L(e)`.
    fn language(&self, e: &Rbe<S>) -> Vec<bool> {
        let n = self.size();
        match e {
            Rbe::Epsilon => {
                let mut out = vec![false; n];
                out[0] = true;
                out
            }
            Rbe::Symbol(s, i) => {
                let mut out = vec![false; n];
                match self.position.get(s) {
                    Some(&k) => (0..=self.counts[k]).filter(|&c| i.contains(c)).for_each(|c| out[c as usize * self.stride[k]] = true),
                    None => out[0] = i.contains(0),
                }
                out
            }
            Rbe::Disj(items) => items.iter().fold(vec![false; n], |acc, b| {
                acc.iter().zip(self.language(b)).map(|(x, y)| *x || y).collect()
            }),
            Rbe::Inter(items) => items.iter().fold(vec![true; n], |acc, b| {
                acc.iter().zip(self.language(b)).map(|(x, y)| *x && y).collect()
            }),
            Rbe::Concat(items) => {
                let mut acc = self.language(&Rbe::Epsilon);
                for b in items {
                    acc = self.sum(&acc, &self.language(b));
                }
                acc
            }
            Rbe::Star(b) | Rbe::Plus(b) => {
                let body = self.language(b);
                let mut reached = self.language(&Rbe::Epsilon);
                let mut frontier = reached.clone();
                while frontier.iter().any(|&x| x) {
                    let step = self.sum(&frontier, &body);
                    frontier = step.iter().zip(&reached).map(|(&s, &r)| s && !r).collect();
                    reached.iter_mut().zip(&frontier).for_each(|(r, &f)| *r |= f);
                }
                if matches!(e, Rbe::Plus(_)) {
                    self.sum(&body, &reached)
                } else {
                    reached
                }
            }
        }
    }
}

/// Membership by computing which sub-bags of `w` each subexpression
/// denotes. Exact for every expression; costs `O(N²)` per operator with
/// `N` = [`sub_bag_count`].
pub fn member_sub_bags<S: Ord + Clone>(w: &Bag<S>, e: &Rbe<S>) -> MembershipWitness {
    let table = SubBags::new(w);
    let verdict = table.language(e)[table.size() - 1];
    MembershipWitness { verdict, interval: None, algorithm: MembershipAlgorithm::SubBags }
}

/// Single-occurrence expressions go to the interval algorithm, small bags
/// to the sub-bag table, the rest to the integer encoding.
pub fn member<S: Ord + Clone>(w: &Bag<S>, e: &Rbe<S>) -> Result<MembershipWitness, MembershipError> {
    if e.is_sorbe() {
        member_sorbe(w, e)
    } else if sub_bag_count(w) <= SUB_BAG_LIMIT {
        Ok(member_sub_bags(w, e))
    } else {
        member_general(w, e)
    }
}
