//! Shape expression schemas over regular bag expressions.

pub mod gen;
pub mod graph;
pub mod membership;
pub mod rbe;
pub mod sat;
pub mod schema;
pub mod symbol;
pub mod validate;
