//! Depth-first branch and bound over bounded integer domains with interval
//! propagation and a divisibility test on every equation.

use std::collections::VecDeque;

use super::linear::{LinExpr, LinearSystem};

/// Default per-variable search cap for targets without a completeness bound.
pub const DEFAULT_ILP_CAP: u64 = 1_000_000;
/// Default limit on explored search nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

/// Reads `SHEX_ILP_CAP`, falling back to [`DEFAULT_ILP_CAP`].
pub fn default_cap() -> u64 {
    std::env::var("SHEX_ILP_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ILP_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model(Vec<u64>);

impl Model {
    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn eval(&self, e: &LinExpr) -> i128 {
        e.eval(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IlpVerdict {
    Sat(Model),
    Unsat,
    /// Search ended without a model and without a refutation that covers
    /// the whole space.
    UnknownCapped { cap: u64, bound: Option<u64> },
}

impl IlpVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, IlpVerdict::Sat(_))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IlpConfig {
    pub cap: u64,
    pub node_budget: u64,
}

impl Default for IlpConfig {
    fn default() -> Self {
        IlpConfig { cap: default_cap(), node_budget: DEFAULT_NODE_BUDGET }
    }
}

pub fn ilp_feasible(sys: &LinearSystem, cap: u64) -> IlpVerdict {
    ilp_feasible_with(sys, IlpConfig { cap, node_budget: DEFAULT_NODE_BUDGET })
}

pub fn ilp_feasible_with(sys: &LinearSystem, cfg: IlpConfig) -> IlpVerdict {
    Solver::new(sys, cfg).run()
}

#[derive(Clone, Copy, Debug)]
struct Dom {
    lo: i128,
    hi: Option<i128>,
}

impl Dom {
    fn fixed(self) -> bool {
        self.hi == Some(self.lo)
    }
}

struct Eqn {
    terms: Vec<(usize, i128)>,
    k: i128,
}

impl Eqn {
    fn from(e: &LinExpr) -> Self {
        Eqn { terms: e.terms().map(|(v, c)| (v.index(), c as i128)).collect(), k: e.constant_part() as i128 }
    }
}

struct Infeasible;

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) { q - 1 } else { q }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) { q + 1 } else { q }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Range of `Σ a·x + k`: finite parts plus counts of infinite contributions.
struct Range {
    min: i128,
    min_inf: u32,
    max: i128,
    max_inf: u32,
}

fn term_range(a: i128, d: Dom) -> (Option<i128>, Option<i128>) {
    if a > 0 {
        (Some(a * d.lo), d.hi.map(|h| a * h))
    } else {
        (d.hi.map(|h| a * h), Some(a * d.lo))
    }
}

fn range(eq: &Eqn, doms: &[Dom]) -> Range {
    let mut r = Range { min: eq.k, min_inf: 0, max: eq.k, max_inf: 0 };
    for &(v, a) in &eq.terms {
        let (lo, hi) = term_range(a, doms[v]);
        match lo {
            Some(x) => r.min += x,
            None => r.min_inf += 1,
        }
        match hi {
            Some(x) => r.max += x,
            None => r.max_inf += 1,
        }
    }
    r
}

fn consistent(eq: &Eqn, doms: &[Dom]) -> bool {
    let r = range(eq, doms);
    if (r.min_inf == 0 && r.min > 0) || (r.max_inf == 0 && r.max < 0) {
        return false;
    }
    let mut g = 0;
    let mut fixed = eq.k;
    for &(v, a) in &eq.terms {
        if doms[v].fixed() {
            fixed += a * doms[v].lo;
        } else {
            g = gcd(g, a);
        }
    }
    if g == 0 { fixed == 0 } else { fixed % g == 0 }
}

/// Tightens domains against one equation; reports the variables changed.
fn revise(eq: &Eqn, doms: &mut [Dom], changed: &mut Vec<usize>) -> Result<(), Infeasible> {
    if !consistent(eq, doms) {
        return Err(Infeasible);
    }
    let r = range(eq, doms);
    for &(v, a) in &eq.terms {
        let (tlo, thi) = term_range(a, doms[v]);
        let rest_min = match tlo {
            Some(x) if r.min_inf == 0 => Some(r.min - x),
            None if r.min_inf == 1 => Some(r.min),
            _ => None,
        };
        let rest_max = match thi {
            Some(x) if r.max_inf == 0 => Some(r.max - x),
            None if r.max_inf == 1 => Some(r.max),
            _ => None,
        };
        // a·x ∈ [-rest_max, -rest_min]
        let ax_lo = rest_max.map(|m| -m);
        let ax_hi = rest_min.map(|m| -m);
        let (new_lo, new_hi) = if a > 0 {
            (ax_lo.map(|l| div_ceil(l, a)), ax_hi.map(|h| div_floor(h, a)))
        } else {
            (ax_hi.map(|h| div_ceil(h, a)), ax_lo.map(|l| div_floor(l, a)))
        };
        let d = &mut doms[v];
        let mut touched = false;
        if let Some(l) = new_lo {
            if l > d.lo {
                d.lo = l;
                touched = true;
            }
        }
        if let Some(h) = new_hi {
            if d.hi.is_none_or(|cur| h < cur) {
                d.hi = Some(h);
                touched = true;
            }
        }
        if let Some(h) = d.hi {
            if h < d.lo {
                return Err(Infeasible);
            }
        }
        if touched {
            changed.push(v);
        }
    }
    Ok(())
}

#[derive(Clone)]
struct Node {
    doms: Vec<Dom>,
    chosen: Vec<Option<usize>>,
}

struct Solver<'a> {
    sys: &'a LinearSystem,
    cfg: IlpConfig,
    eqns: Vec<Eqn>,
    /// For split `s`, alternative `a`: ids into `eqns`.
    alt_eqns: Vec<Vec<Vec<usize>>>,
    /// Owner of each equation: `None` for the base system.
    owner: Vec<Option<(usize, usize)>>,
    watch: Vec<Vec<usize>>,
    /// Whether the domains were cut at the cap rather than at a proven bound.
    capped_domains: bool,
    hit_cap: bool,
    nodes: u64,
}

impl<'a> Solver<'a> {
    fn new(sys: &'a LinearSystem, cfg: IlpConfig) -> Self {
        let mut eqns: Vec<Eqn> = sys.equations.iter().map(Eqn::from).collect();
        let mut owner = vec![None; eqns.len()];
        let mut alt_eqns = Vec::new();
        for (s, split) in sys.case_splits.iter().enumerate() {
            let mut alts = Vec::new();
            for (a, alt) in split.iter().enumerate() {
                let mut ids = Vec::new();
                for e in alt {
                    ids.push(eqns.len());
                    eqns.push(Eqn::from(e));
                    owner.push(Some((s, a)));
                }
                alts.push(ids);
            }
            alt_eqns.push(alts);
        }
        let mut watch = vec![Vec::new(); sys.vars.len()];
        for (i, eq) in eqns.iter().enumerate() {
            for &(v, _) in &eq.terms {
                watch[v].push(i);
            }
        }
        Solver { sys, cfg, eqns, alt_eqns, owner, watch, capped_domains: false, hit_cap: false, nodes: 0 }
    }

    fn active(&self, node: &Node, eq: usize) -> bool {
        match self.owner[eq] {
            None => true,
            Some((s, a)) => node.chosen[s] == Some(a),
        }
    }

    fn propagate(&self, node: &mut Node, seeds: impl Iterator<Item = usize>) -> Result<(), Infeasible> {
        let mut queue: VecDeque<usize> = seeds.collect();
        let mut queued = vec![false; self.eqns.len()];
        for &q in &queue {
            queued[q] = true;
        }
        let mut budget = 64 * self.eqns.len() + 1024;
        let mut changed = Vec::new();
        while let Some(eq) = queue.pop_front() {
            queued[eq] = false;
            if budget == 0 {
                break;
            }
            budget -= 1;
            changed.clear();
            revise(&self.eqns[eq], &mut node.doms, &mut changed)?;
            for &v in &changed {
                for &other in &self.watch[v] {
                    if !queued[other] && self.active(node, other) {
                        queued[other] = true;
                        queue.push_back(other);
                    }
                }
            }
        }
        Ok(())
    }

    fn cap_for(&self, v: usize) -> i128 {
        self.sys.vars[v].scale as i128 * self.cfg.cap as i128
    }

    fn initial(&mut self) -> Node {
        let bound = match self.sys.completeness_bound {
            Some(b) if b <= self.cfg.cap => Some(b),
            Some(_) => {
                self.capped_domains = true;
                Some(self.cfg.cap)
            }
            None => None,
        };
        let doms = self
            .sys
            .vars
            .iter()
            .map(|v| Dom { lo: 0, hi: bound.map(|b| v.scale as i128 * b as i128) })
            .collect();
        Node { doms, chosen: vec![None; self.sys.case_splits.len()] }
    }

    /// Propagates and commits forced case splits. `Err` means the node is dead.
    fn settle(&mut self, node: &mut Node) -> Result<(), Infeasible> {
        let base: Vec<usize> = (0..self.eqns.len()).filter(|&e| self.active(node, e)).collect();
        self.propagate(node, base.into_iter())?;
        loop {
            let mut committed = None;
            for s in 0..self.alt_eqns.len() {
                if node.chosen[s].is_some() {
                    continue;
                }
                let live: Vec<usize> = (0..self.alt_eqns[s].len())
                    .filter(|&a| self.alt_eqns[s][a].iter().all(|&e| consistent(&self.eqns[e], &node.doms)))
                    .collect();
                match live.len() {
                    0 => return Err(Infeasible),
                    1 => {
                        committed = Some((s, live[0]));
                        break;
                    }
                    _ => {}
                }
            }
            match committed {
                None => break,
                Some((s, a)) => {
                    node.chosen[s] = Some(a);
                    let ids = self.alt_eqns[s][a].clone();
                    self.propagate(node, ids.into_iter())?;
                }
            }
        }
        if self.sys.completeness_bound.is_none() {
            for (v, d) in node.doms.iter().enumerate() {
                if d.lo > self.cap_for(v) {
                    self.hit_cap = true;
                    return Err(Infeasible);
                }
            }
        }
        Ok(())
    }

    fn children(&self, node: &Node) -> Option<Vec<Node>> {
        if let Some(s) = node.chosen.iter().position(Option::is_none) {
            let out = (0..self.alt_eqns[s].len())
                .filter(|&a| self.alt_eqns[s][a].iter().all(|&e| consistent(&self.eqns[e], &node.doms)))
                .map(|a| {
                    let mut child = node.clone();
                    child.chosen[s] = Some(a);
                    child
                })
                .collect();
            return Some(out);
        }
        let mut best: Option<(usize, Option<i128>)> = None;
        for (v, d) in node.doms.iter().enumerate() {
            if d.fixed() {
                continue;
            }
            let width = d.hi.map(|h| h - d.lo);
            let better = match (best, width) {
                (None, _) => true,
                (Some((_, None)), Some(_)) => true,
                (Some((_, Some(bw))), Some(w)) => w < bw,
                (Some((b, None)), None) => d.lo < node.doms[b].lo,
                _ => false,
            };
            if better {
                best = Some((v, width));
            }
        }
        let (v, _) = best?;
        let d = node.doms[v];
        let pieces: Vec<Dom> = match d.hi {
            Some(h) if h - d.lo <= 3 => (d.lo..=h).map(|x| Dom { lo: x, hi: Some(x) }).collect(),
            Some(h) => {
                let mid = d.lo + (h - d.lo) / 2;
                vec![Dom { lo: d.lo, hi: Some(mid) }, Dom { lo: mid + 1, hi: Some(h) }]
            }
            None => {
                let mid = 2 * d.lo + 1;
                vec![Dom { lo: d.lo, hi: Some(mid) }, Dom { lo: mid + 1, hi: None }]
            }
        };
        Some(
            pieces
                .into_iter()
                .map(|p| {
                    let mut child = node.clone();
                    child.doms[v] = p;
                    child
                })
                .collect(),
        )
    }

    fn run(mut self) -> IlpVerdict {
        let root = self.initial();
        let mut stack = vec![root];
        while let Some(mut node) = stack.pop() {
            self.nodes += 1;
            if self.nodes > self.cfg.node_budget {
                return self.unknown();
            }
            if self.settle(&mut node).is_err() {
                continue;
            }
            match self.children(&node) {
                None => {
                    let values: Vec<u64> = node.doms.iter().map(|d| d.lo as u64).collect();
                    let ok = self
                        .eqns
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| self.active(&node, i))
                        .all(|(_, eq)| eq.terms.iter().map(|&(v, a)| a * values[v] as i128).sum::<i128>() + eq.k == 0);
                    if ok {
                        return IlpVerdict::Sat(Model(values));
                    }
                }
                Some(kids) => stack.extend(kids.into_iter().rev()),
            }
        }
        if self.capped_domains || self.hit_cap {
            self.unknown()
        } else {
            IlpVerdict::Unsat
        }
    }

    fn unknown(&self) -> IlpVerdict {
        IlpVerdict::UnknownCapped { cap: self.cfg.cap, bound: self.sys.completeness_bound }
    }
}
