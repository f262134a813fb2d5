use std::collections::BTreeSet;

use thiserror::Error;

use super::{Bag, Interval, Rbe};

/// Hard ceiling on the number of bags materialised by enumeration.
pub const ENUMERATION_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("enumeration exceeded {limit} bags")]
    ResourceLimit { limit: usize },
}

type Lang<S> = BTreeSet<Bag<S>>;

/// All bags of `L(e)` with at most `max_size` elements.
pub fn enumerate_language<S: Ord + Clone>(e: &Rbe<S>, max_size: u64) -> Result<Lang<S>, EnumerationError> {
    enumerate_capped(e, max_size, ENUMERATION_CAP)
}

pub fn enumerate_capped<S: Ord + Clone>(e: &Rbe<S>, max_size: u64, cap: usize) -> Result<Lang<S>, EnumerationError> {
    Enumerator { max_size, cap }.lang(e)
}

struct Enumerator {
    max_size: u64,
    cap: usize,
}

impl Enumerator {
    fn check<S: Ord>(&self, l: Lang<S>) -> Result<Lang<S>, EnumerationError> {
        if l.len() > self.cap {
            Err(EnumerationError::ResourceLimit { limit: self.cap })
        } else {
            Ok(l)
        }
    }

    fn sum<S: Ord + Clone>(&self, a: &Lang<S>, b: &Lang<S>) -> Result<Lang<S>, EnumerationError> {
        let mut out = BTreeSet::new();
        for x in a {
            for y in b {
                if x.size() + y.size() <= self.max_size {
                    out.insert(x.union(y));
                    if out.len() > self.cap {
                        return Err(EnumerationError::ResourceLimit { limit: self.cap });
                    }
                }
            }
        }
        Ok(out)
    }

    fn closure<S: Ord + Clone>(&self, body: &Lang<S>) -> Result<Lang<S>, EnumerationError> {
        let steps: Vec<&Bag<S>> = body.iter().filter(|b| !b.is_empty()).collect();
        let mut out: Lang<S> = BTreeSet::from([Bag::new()]);
        let mut frontier = vec![Bag::new()];
        while let Some(b) = frontier.pop() {
            for s in &steps {
                if b.size() + s.size() <= self.max_size {
                    let next = b.union(s);
                    if out.insert(next.clone()) {
                        frontier.push(next);
                    }
                }
            }
            if out.len() > self.cap {
                return Err(EnumerationError::ResourceLimit { limit: self.cap });
            }
        }
        Ok(out)
    }

    fn lang<S: Ord + Clone>(&self, e: &Rbe<S>) -> Result<Lang<S>, EnumerationError> {
        let out = match e {
            Rbe::Epsilon => BTreeSet::from([Bag::new()]),
            Rbe::Symbol(s, i) => symbol_powers(s, *i, self.max_size),
            Rbe::Disj(v) => {
                let mut out = BTreeSet::new();
                for arm in v {
                    out.extend(self.lang(arm)?);
                }
                out
            }
            Rbe::Concat(v) => {
                let mut acc = BTreeSet::from([Bag::new()]);
                for part in v {
                    acc = self.sum(&acc, &self.lang(part)?)?;
                }
                acc
            }
            Rbe::Inter(v) => {
                let mut acc = self.lang(&v[0])?;
                for arm in &v[1..] {
                    let other = self.lang(arm)?;
                    acc.retain(|b| other.contains(b));
                }
                acc
            }
            Rbe::Star(b) => self.closure(&self.lang(b)?)?,
            Rbe::Plus(b) => {
                let once = self.lang(b)?;
                self.sum(&once, &self.closure(&once)?)?
            }
        };
        self.check(out)
    }
}

fn symbol_powers<S: Ord + Clone>(s: &S, i: Interval, max_size: u64) -> BTreeSet<Bag<S>> {
    match i.bounds() {
        None => BTreeSet::new(),
        Some((lo, hi)) => {
            let top = hi.map_or(max_size, |h| h.min(max_size));
            (lo..=top).map(|k| Bag::singleton(s.clone(), k)).filter(|b| b.size() <= max_size).collect()
        }
    }
}
