use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::rbe::{normalize_product, ClassError, Interval, ProductNormalForm, Rbe, Rbe1};

/// Arc with lower and upper capacity; `upper = None` is unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub lower: u64,
    pub upper: Option<u64>,
}

/// Capacitated network checked for a feasible circulation.
#[derive(Clone, Debug, Default)]
pub struct FlowNetwork {
    pub names: Vec<String>,
    pub arcs: Vec<FlowArc>,
}

impl FlowNetwork {
    pub fn add_node(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    /// An empty interval yields an arc with `lower > upper`, which no
    /// circulation can satisfy.
    pub fn add_arc(&mut self, from: usize, to: usize, interval: Interval) {
        let (lower, upper) = match interval.bounds() {
            Some(b) => b,
            None => (1, Some(0)),
        };
        self.arcs.push(FlowArc { from, to, lower, upper });
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn arc(&self, from: &str, to: &str) -> Option<&FlowArc> {
        let (f, t) = (self.node(from)?, self.node(to)?);
        self.arcs.iter().find(|a| a.from == f && a.to == t)
    }
}

impl fmt::Display for FlowNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.arcs {
            let hi = a.upper.map_or("∞".to_string(), |u| u.to_string());
            writeln!(f, "{} -> {} [{};{}]", self.names[a.from], self.names[a.to], a.lower, hi)?;
        }
        Ok(())
    }
}

/// Network whose circulations witness `L(e0) ∩ L(e) ≠ ∅`; `e` must lie in
/// RBE(a^M, ‖, ∩). Unbounded intervals are cut at the group count.
pub fn build_flow_network<S: Ord + Clone + fmt::Display>(e0: &Rbe1<S>, e: &Rbe<S>) -> Result<FlowNetwork, ClassError> {
    let nf = normalize_product(e)?;
    let k = e0.len() as u64;
    let mut net = FlowNetwork::default();
    let source = net.add_node("s");
    let groups: Vec<usize> = (0..e0.len()).map(|i| net.add_node(format!("C{}", i + 1))).collect();
    let mut symbols: BTreeMap<S, usize> = BTreeMap::new();
    let mut alphabet = e0.alphabet();
    if let ProductNormalForm::Product(m) = &nf {
        alphabet.extend(m.keys().cloned());
    } else {
        alphabet.extend(e.alphabet());
    }
    for s in &alphabet {
        let id = net.add_node(s.to_string());
        symbols.insert(s.clone(), id);
    }
    let sink = net.add_node("t");
    for (i, g) in e0.groups().iter().enumerate() {
        net.add_arc(source, groups[i], Interval::ONE);
        for s in g {
            net.add_arc(groups[i], symbols[s], Interval::OPT);
        }
    }
    for (s, &id) in &symbols {
        net.add_arc(id, sink, nf.interval(s).capped(k));
    }
    net.add_arc(sink, source, Interval::STAR);
    Ok(net)
}

/// Feasible circulation test via the lower-bound reduction and BFS augmenting
/// paths (Edmonds–Karp).
pub fn circulation_exists(net: &FlowNetwork) -> bool {
    if net.arcs.iter().any(|a| a.upper.is_some_and(|u| u < a.lower)) {
        return false;
    }
    let n = net.names.len();
    let mut excess = vec![0i64; n];
    for a in &net.arcs {
        excess[a.to] += a.lower as i64;
        excess[a.from] -= a.lower as i64;
    }
    let demand: i64 = excess.iter().filter(|&&x| x > 0).sum();
    let unbounded = demand + 1;
    let (ss, tt) = (n, n + 1);
    let mut g = Residual::new(n + 2);
    for a in &net.arcs {
        let cap = a.upper.map_or(unbounded, |u| (u - a.lower) as i64);
        g.add(a.from, a.to, cap);
    }
    for (v, &x) in excess.iter().enumerate() {
        if x > 0 {
            g.add(ss, v, x);
        } else if x < 0 {
            g.add(v, tt, -x);
        }
    }
    g.max_flow(ss, tt) == demand
}

struct Residual {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Residual { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    fn add(&mut self, u: usize, v: usize, c: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let mut prev: Vec<Option<usize>> = vec![None; self.head.len()];
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if !seen[v] && self.cap[e] > 0 {
                        seen[v] = true;
                        prev[v] = Some(e);
                        q.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while let Some(e) = prev[v] {
                push = push.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while let Some(e) = prev[v] {
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.to[e ^ 1];
            }
            total += push;
        }
    }
}
