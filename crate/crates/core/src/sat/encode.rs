use std::collections::{BTreeMap, BTreeSet};

use crate::rbe::{Bag, Rbe};

use super::ilp::Model;
use super::linear::{LinExpr, LinearSystem};

/// Counting vector of an expression: one linear term per symbol.
pub type CountVector<S> = BTreeMap<S, LinExpr>;

/// A system together with the counting vector of the encoded target bag.
pub struct Encoding<S: Ord> {
    pub system: LinearSystem,
    pub counts: CountVector<S>,
}

impl<S: Ord + Clone> Encoding<S> {
    pub fn decode(&self, m: &Model) -> Bag<S> {
        self.counts.iter().map(|(s, e)| (s.clone(), m.eval(e).max(0) as u64)).collect()
    }
}

/// Builds `Φ_E(x̄, n)` constraints into a system.
pub struct Encoder<'a> {
    pub sys: &'a mut LinearSystem,
    /// Number of gated copies for a star whose body contains `∩`.
    pub unroll: u64,
    counter: usize,
}

impl<'a> Encoder<'a> {
    pub fn new(sys: &'a mut LinearSystem, unroll: u64) -> Self {
        Encoder { sys, unroll, counter: 0 }
    }

    fn fresh(&mut self, base: &str, scale: u64) -> LinExpr {
        self.counter += 1;
        let id = self.sys.fresh(format!("{base}{}", self.counter), scale);
        LinExpr::var(id)
    }

    /// Fresh counting vector over `alphabet`.
    pub fn fresh_counts<S: Ord + Clone>(&mut self, alphabet: &BTreeSet<S>, base: &str) -> CountVector<S> {
        alphabet.iter().map(|s| (s.clone(), self.fresh(base, 1))).collect()
    }

    fn zero_all<S: Ord>(&mut self, x: &CountVector<S>) {
        for e in x.values() {
            self.sys.require(e.clone());
        }
    }

    /// Asserts `x ∈ L(e)^n`. Symbols of `x` outside `alphabet(e)` are forced to 0.
    pub fn encode<S: Ord + Clone>(&mut self, e: &Rbe<S>, x: &CountVector<S>, n: &LinExpr) {
        match e {
            Rbe::Epsilon => self.zero_all(x),
            Rbe::Symbol(a, interval) => {
                for (s, ex) in x {
                    if s != a {
                        self.sys.require(ex.clone());
                    }
                }
                let xa = x.get(a).cloned().unwrap_or_default();
                match interval.bounds() {
                    None => {
                        self.sys.require(n.clone());
                        self.sys.require(xa);
                    }
                    Some((lo, Some(hi))) if hi == lo => {
                        self.sys.require(xa.plus(n, -(lo as i64)));
                    }
                    Some((lo, hi)) => {
                        let s = self.fresh("s", 1);
                        self.sys.require(xa.plus(n, -(lo as i64)).minus(&s));
                        match hi {
                            Some(hi) => {
                                let width = hi - lo;
                                let s2 = self.fresh("s", width);
                                self.sys.require(s.plus(&s2, 1).plus(n, -(width as i64)));
                            }
                            // zero runs admit no surplus
                            None => match n.as_constant() {
                                Some(0) => self.sys.require(s),
                                Some(_) => {}
                                None => {
                                    let u = self.fresh("u", 1);
                                    let busy = n.clone().minus(&u).plus(&LinExpr::constant(-1), 1);
                                    self.sys.case_split(vec![vec![n.clone(), s], vec![busy]]);
                                }
                            },
                        }
                    }
                }
            }
            Rbe::Disj(arms) => {
                let parts = self.split(x, arms);
                let counts: Vec<LinExpr> = match n.as_constant() {
                    Some(0) => arms.iter().map(|_| LinExpr::zero()).collect(),
                    _ => arms.iter().map(|_| self.fresh("n", 1)).collect(),
                };
                if n.as_constant() != Some(0) {
                    let total = counts.iter().fold(LinExpr::zero(), |acc, c| acc.plus(c, 1));
                    self.sys.equate(n, &total);
                }
                for ((arm, xi), ni) in arms.iter().zip(parts).zip(counts) {
                    self.encode(arm, &xi, &ni);
                }
            }
            Rbe::Concat(parts) => {
                let split = self.split(x, parts);
                for (p, xi) in parts.iter().zip(split) {
                    self.encode(p, &xi, n);
                }
            }
            Rbe::Inter(arms) => {
                if n.as_constant().is_none_or(|k| k > 1) {
                    // only single runs of an intersection are encoded exactly
                    let z = self.fresh("z", 1);
                    self.sys.require(n.clone().plus(&z, 1).plus(&LinExpr::constant(-1), 1));
                }
                for arm in arms {
                    let sub: CountVector<S> = x.clone();
                    self.encode(arm, &sub, n);
                }
            }
            Rbe::Star(body) | Rbe::Plus(body) => {
                let plus = matches!(e, Rbe::Plus(_));
                if n.as_constant() == Some(0) {
                    self.zero_all(x);
                } else if body.has_inter() {
                    self.unrolled(body, x, n, plus);
                } else {
                    self.iterated(body, x, n, plus);
                }
            }
        }
    }

    fn iterated<S: Ord + Clone>(&mut self, body: &Rbe<S>, x: &CountVector<S>, n: &LinExpr, plus: bool) {
        let inner = self.fresh("m", 1);
        let mut active = Vec::new();
        if plus {
            let u = self.fresh("u", 1);
            active.push(inner.clone().minus(&u).plus(&LinExpr::constant(-1), 1));
        }
        if n.as_constant().is_some() {
            for c in active {
                self.sys.require(c);
            }
        } else {
            let u = self.fresh("u", 1);
            active.push(n.clone().minus(&u).plus(&LinExpr::constant(-1), 1));
            let mut idle: Vec<LinExpr> = vec![n.clone(), inner.clone()];
            idle.extend(x.values().cloned());
            self.sys.case_split(vec![idle, active]);
        }
        self.encode(body, x, &inner);
    }

    fn unrolled<S: Ord + Clone>(&mut self, body: &Rbe<S>, x: &CountVector<S>, n: &LinExpr, plus: bool) {
        let alphabet = body.alphabet();
        let k = self.unroll.max(1);
        let mut copies = Vec::new();
        let mut gates = Vec::new();
        for _ in 0..k {
            let xi = self.fresh_counts(&alphabet, "c");
            let g = self.fresh("g", 1);
            let z = self.fresh("z", 1);
            self.sys.require(g.clone().plus(&z, 1).plus(&LinExpr::constant(-1), 1));
            self.encode(body, &xi, &g);
            copies.push(xi);
            gates.push(g);
        }
        for w in gates.windows(2) {
            let v = self.fresh("v", 1);
            self.sys.require(w[0].clone().minus(&w[1]).minus(&v));
        }
        for (s, ex) in x {
            let total = copies.iter().fold(LinExpr::zero(), |acc, c| match c.get(s) {
                Some(t) => acc.plus(t, 1),
                None => acc,
            });
            self.sys.equate(ex, &total);
        }
        let mut active = Vec::new();
        if plus {
            let total = gates.iter().fold(LinExpr::zero(), |acc, g| acc.plus(g, 1));
            let u = self.fresh("u", 1);
            active.push(total.minus(&u).plus(&LinExpr::constant(-1), 1));
        }
        if n.as_constant().is_some() {
            for c in active {
                self.sys.require(c);
            }
        } else {
            let u = self.fresh("u", 1);
            active.push(n.clone().minus(&u).plus(&LinExpr::constant(-1), 1));
            let mut idle = vec![n.clone()];
            idle.extend(gates.iter().cloned());
            self.sys.case_split(vec![idle, active]);
        }
    }

    /// Distributes `x` over sub-expressions: symbols owned by one part pass
    /// through, shared symbols get fresh summands.
    fn split<S: Ord + Clone>(&mut self, x: &CountVector<S>, parts: &[Rbe<S>]) -> Vec<CountVector<S>> {
        let alphabets: Vec<BTreeSet<S>> = parts.iter().map(Rbe::alphabet).collect();
        let mut out: Vec<CountVector<S>> = vec![BTreeMap::new(); parts.len()];
        for (s, ex) in x {
            let owners: Vec<usize> = (0..parts.len()).filter(|&i| alphabets[i].contains(s)).collect();
            match owners.len() {
                0 => self.sys.require(ex.clone()),
                1 => {
                    out[owners[0]].insert(s.clone(), ex.clone());
                }
                _ => {
                    let mut total = LinExpr::zero();
                    for &i in &owners {
                        let v = self.fresh("x", 1);
                        total = total.plus(&v, 1);
                        out[i].insert(s.clone(), v);
                    }
                    self.sys.equate(ex, &total);
                }
            }
        }
        out
    }
}

/// `Ψ_E(w)`: a system satisfiable iff `w ∈ L(e)`.
pub fn encode_membership<S: Ord + Clone>(e: &Rbe<S>, w: &Bag<S>) -> Encoding<S> {
    let mut sys = LinearSystem::new();
    let mut keys = e.alphabet();
    keys.extend(w.support());
    let counts: CountVector<S> = keys.into_iter().map(|s| {
        let c = w.count(&s) as i64;
        (s, LinExpr::constant(c))
    }).collect();
    let size = w.size();
    {
        let mut enc = Encoder::new(&mut sys, size.max(1));
        enc.encode(e, &counts, &LinExpr::constant(1));
    }
    sys.completeness_bound = Some(size + 1);
    Encoding { system: sys, counts }
}

/// `Ψ_E(x̄)` with a free counting vector.
pub fn encode_free<S: Ord + Clone>(e: &Rbe<S>, unroll: u64) -> Encoding<S> {
    let mut sys = LinearSystem::new();
    let counts = {
        let mut enc = Encoder::new(&mut sys, unroll);
        let counts = enc.fresh_counts(&e.alphabet(), "x");
        enc.encode(e, &counts, &LinExpr::constant(1));
        counts
    };
    Encoding { system: sys, counts }
}
