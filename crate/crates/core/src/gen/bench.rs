use std::fmt::Write;
use std::time::Instant;

use thiserror::Error;

use super::{generate_graph, GenConfig, GenError, Multiplicities};
use crate::graph::Graph;
use crate::schema::Schema;
use crate::validate::{validate_multi, Algorithm, PreTyping, ValidateError};

pub const CSV_HEADER: &str = "algo,n_nodes,n_triples,seed,millis";

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub algo: Algorithm,
    pub n_nodes: usize,
    pub n_triples: usize,
    pub seed: u64,
    /// Mean over the kept repeats.
    pub millis: f64,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("at least two repeats are needed (the first is discarded)")]
    TooFewRepeats,
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Validate(#[from] ValidateError),
    #[error("{algo} rejected the generated graph with {n_nodes} nodes")]
    Rejected { algo: Algorithm, n_nodes: usize },
}

fn time_once(g: &Graph, s: &Schema, algo: Algorithm, roots: &PreTyping, n_nodes: usize) -> Result<f64, BenchError> {
    let start = Instant::now();
    let report = validate_multi(g, s, algo, Some(roots))?;
    let millis = start.elapsed().as_secs_f64() * 1e3;
    if !report.is_valid() {
        return Err(BenchError::Rejected { algo, n_nodes });
    }
    Ok(millis)
}

/// One row per `(size, algo)`: the graph for a size is generated once with
/// `seed` and shared by all algorithms. Only the validation call is timed.
pub fn bench(
    schema: &Schema,
    sizes: &[usize],
    algos: &[Algorithm],
    repeats: usize,
    seed: u64,
    multiplicities: Multiplicities,
) -> Result<Vec<BenchRow>, BenchError> {
    if repeats < 2 {
        return Err(BenchError::TooFewRepeats);
    }
    let mut rows = Vec::new();
    for &n_nodes in sizes {
        let generated = generate_graph(schema, &GenConfig { n_nodes, seed, multiplicities })?;
        for &algo in algos {
            let mut kept = Vec::with_capacity(repeats - 1);
            for run in 0..repeats {
                let millis = time_once(&generated.graph, schema, algo, &generated.roots, n_nodes)?;
                if run > 0 {
                    kept.push(millis);
                }
            }
            rows.push(BenchRow {
                algo,
                n_nodes,
                n_triples: generated.graph.edge_count(),
                seed,
                millis: kept.iter().sum::<f64>() / kept.len() as f64,
            });
        }
    }
    Ok(rows)
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{:.3}", r.algo, r.n_nodes, r.n_triples, r.seed, r.millis);
    }
    out
}
