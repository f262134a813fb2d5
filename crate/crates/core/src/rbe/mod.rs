//! Intervals, bags and regular bag expressions.

mod ast;
mod bag;
mod enumerate;
mod interval;
mod normal;
mod parse;

pub use ast::{ProductForm, Rbe, Rbe1};
pub use bag::Bag;
pub use enumerate::{enumerate_capped, enumerate_language, EnumerationError, ENUMERATION_CAP};
pub use interval::{Interval, Upper};
pub use normal::{normalize_product, ClassError, ProductNormalForm};
pub use parse::{parse_bag_list, parse_plain, parse_rbe, RawSymbol, RbeParseError};

use crate::symbol::{Label, TypedSymbol};

/// Drops the type component of every symbol.
pub fn project_sigma(e: &Rbe<TypedSymbol>) -> Rbe<Label> {
    e.map_symbols(&mut |s: &TypedSymbol| s.label.clone())
}

pub fn interval_intersect(a: Interval, b: Interval) -> Interval {
    a.intersect(b)
}

pub fn interval_add(a: Interval, b: Interval) -> Interval {
    a.add(b)
}
