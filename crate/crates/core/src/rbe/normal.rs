use std::collections::BTreeMap;

use thiserror::Error;

use super::{Interval, ProductForm, Rbe};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassError {
    #[error("expression is outside RBE(a^M, ‖, ∩): found {0}")]
    NotProductClass(&'static str),
}

/// Normal form of an expression in RBE(a^M, ‖, ∩).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductNormalForm<S: Ord> {
    /// `‖_a a^{I_a}`; symbols absent from the map have interval `[0;0]`.
    Product(ProductForm<S>),
    Unsatisfiable,
}

impl<S: Ord + Clone> ProductNormalForm<S> {
    pub fn interval(&self, s: &S) -> Interval {
        match self {
            ProductNormalForm::Product(m) => m.get(s).copied().unwrap_or(Interval::ZERO),
            ProductNormalForm::Unsatisfiable => Interval::EMPTY,
        }
    }
}

/// Combines `‖` by interval sum and `∩` by interval intersection, symbol by symbol.
pub fn normalize_product<S: Ord + Clone>(e: &Rbe<S>) -> Result<ProductNormalForm<S>, ClassError> {
    let m = product_map(e)?;
    Ok(if m.values().any(|i| i.is_empty()) {
        ProductNormalForm::Unsatisfiable
    } else {
        ProductNormalForm::Product(m)
    })
}

fn product_map<S: Ord + Clone>(e: &Rbe<S>) -> Result<ProductForm<S>, ClassError> {
    match e {
        Rbe::Epsilon => Ok(BTreeMap::new()),
        Rbe::Symbol(s, i) => Ok(BTreeMap::from([(s.clone(), *i)])),
        Rbe::Concat(v) => {
            let mut acc: ProductForm<S> = BTreeMap::new();
            for part in v {
                for (s, i) in product_map(part)? {
                    let cur = acc.get(&s).copied().unwrap_or(Interval::ZERO);
                    acc.insert(s, cur.add(i));
                }
            }
            Ok(acc)
        }
        Rbe::Inter(v) => {
            let maps = v.iter().map(product_map).collect::<Result<Vec<_>, _>>()?;
            let mut acc: ProductForm<S> = BTreeMap::new();
            for s in maps.iter().flat_map(|m| m.keys()) {
                let i = maps
                    .iter()
                    .map(|m| m.get(s).copied().unwrap_or(Interval::ZERO))
                    .fold(Interval::STAR, Interval::intersect);
                acc.insert(s.clone(), i);
            }
            Ok(acc)
        }
        Rbe::Disj(_) => Err(ClassError::NotProductClass("disjunction")),
        Rbe::Star(_) => Err(ClassError::NotProductClass("Kleene star")),
        Rbe::Plus(_) => Err(ClassError::NotProductClass("Kleene plus")),
    }
}
