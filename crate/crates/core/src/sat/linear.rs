use std::collections::BTreeMap;
use std::fmt;

/// Index of a non-negative integer variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VarId(pub(crate) u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// `Σ cᵢ·xᵢ + k`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LinExpr {
    terms: BTreeMap<VarId, i64>,
    constant: i64,
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(k: i64) -> Self {
        LinExpr { terms: BTreeMap::new(), constant: k }
    }

    pub fn var(v: VarId) -> Self {
        Self::term(v, 1)
    }

    pub fn term(v: VarId, c: i64) -> Self {
        let mut e = Self::zero();
        e.add_term(v, c);
        e
    }

    pub fn add_term(&mut self, v: VarId, c: i64) {
        let slot = self.terms.entry(v).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&v);
        }
    }

    pub fn add_constant(&mut self, k: i64) {
        self.constant += k;
    }

    pub fn plus(mut self, other: &LinExpr, scale: i64) -> LinExpr {
        for (&v, &c) in &other.terms {
            self.add_term(v, c * scale);
        }
        self.constant += other.constant * scale;
        self
    }

    pub fn minus(self, other: &LinExpr) -> LinExpr {
        self.plus(other, -1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (VarId, i64)> + '_ {
        self.terms.iter().map(|(&v, &c)| (v, c))
    }

    pub fn constant_part(&self) -> i64 {
        self.constant
    }

    /// The constant value when no variable occurs.
    pub fn as_constant(&self) -> Option<i64> {
        self.terms.is_empty().then_some(self.constant)
    }

    pub fn eval(&self, values: &[u64]) -> i128 {
        self.terms.iter().map(|(v, &c)| c as i128 * values[v.index()] as i128).sum::<i128>() + self.constant as i128
    }
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    /// Upper bound is `scale · bound`; slack variables absorbing a whole
    /// interval width carry that width here.
    pub scale: u64,
}

/// A conjunction of linear equations `expr = 0` over non-negative integers,
/// plus finite case splits, each a disjunction of conjunctions.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pub(crate) vars: Vec<Variable>,
    pub(crate) equations: Vec<LinExpr>,
    pub(crate) case_splits: Vec<Vec<Vec<LinExpr>>>,
    /// If any solution exists, one exists with every variable at most
    /// `scale · bound`.
    pub completeness_bound: Option<u64>,
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self, name: impl Into<String>, scale: u64) -> VarId {
        self.vars.push(Variable { name: name.into(), scale: scale.max(1) });
        VarId(self.vars.len() as u32 - 1)
    }

    /// Asserts `expr = 0`.
    pub fn require(&mut self, expr: LinExpr) {
        self.equations.push(expr);
    }

    /// Asserts `lhs = rhs`.
    pub fn equate(&mut self, lhs: &LinExpr, rhs: &LinExpr) {
        self.require(lhs.clone().minus(rhs));
    }

    /// Asserts `expr ≥ k` through a fresh slack.
    pub fn at_least(&mut self, expr: &LinExpr, k: i64, name: &str) {
        let slack = self.fresh(name, 1);
        let mut e = expr.clone();
        e.add_term(slack, -1);
        e.add_constant(-k);
        self.require(e);
    }

    pub fn case_split(&mut self, alternatives: Vec<Vec<LinExpr>>) {
        self.case_splits.push(alternatives);
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn equations(&self) -> &[LinExpr] {
        &self.equations
    }

    pub fn case_splits(&self) -> &[Vec<Vec<LinExpr>>] {
        &self.case_splits
    }

    fn fmt_eq(&self, e: &LinExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |positive: bool| -> Vec<String> {
            e.terms()
                .filter(|&(_, c)| (c > 0) == positive)
                .map(|(v, c)| {
                    let c = c.abs();
                    let name = &self.vars[v.index()].name;
                    if c == 1 { name.clone() } else { format!("{c}·{name}") }
                })
                .collect()
        };
        let mut lhs = side(true);
        let mut rhs = side(false);
        let k = e.constant_part();
        if k < 0 {
            rhs.push((-k).to_string());
        } else if k > 0 {
            lhs.push(k.to_string());
        }
        let join = |v: Vec<String>| if v.is_empty() { "0".to_string() } else { v.join(" + ") };
        lhs.sort();
        rhs.sort();
        write!(f, "{} = {}", join(lhs), join(rhs))
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equations {
            self.fmt_eq(e, f)?;
            writeln!(f)?;
        }
        for (i, split) in self.case_splits.iter().enumerate() {
            writeln!(f, "case split {i}:")?;
            for alt in split {
                write!(f, "  |")?;
                for e in alt {
                    write!(f, " ")?;
                    self.fmt_eq(e, f)?;
                    write!(f, ";")?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}
