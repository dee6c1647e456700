//! Refinement-driven clients of the engine: broom packs of query
//! refinements with lookahead, and level-wise frequent-query mining.

mod bias;
mod refine;
mod warmr;


use std::collections::HashSet;

use crate::datastore::Database;
use crate::engine::{EvalError, ResultSet};

pub use bias::{parse_bias, BiasError, LanguageBias, Mode, Template};
pub use refine::{build_broom, canonical, key_vars, refine};
pub use warmr::{warmr_levelwise, FrequentQuery, LevelStats, MiningRun};

#[derive(Debug, thiserror::Error)]
pub enum MinerError {
    #[error("the bias yields no refinement of the query")]
    EmptyRefinementSet,
    #[error("accuracy of query {query} is undefined: it covers no example")]
    UndefinedAccuracy { query: usize },
    #[error("query {query} out of range: the result set has {count} queries")]
    QueryOutOfRange { query: usize, count: usize },
    #[error("{0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Number of examples on which the query succeeds.
pub fn frequency(query: usize, rs: &ResultSet) -> Result<usize, MinerError> {
    if query >= rs.query_count() {
        return Err(MinerError::QueryOutOfRange {
            query,
            count: rs.query_count(),
        });
    }
    Ok(rs.count(query))
}

/// Fraction of the examples covered by the query whose id is in `positives`.
pub fn clause_accuracy(query: usize, rs: &ResultSet, positives: &HashSet<u64>) -> Result<f64, MinerError> {
    let covered = frequency(query, rs)?;
    if covered == 0 {
        return Err(MinerError::UndefinedAccuracy { query });
    }
    let ids = rs.example_ids();
    let pos = rs.covered(query).into_iter().filter(|&e| positives.contains(&ids[e])).count();
    Ok(pos as f64 / covered as f64)
}

/// Ids of the examples carrying `label`.
pub fn labelled(db: &Database, label: &str) -> HashSet<u64> {
    db.examples
        .examples
        .iter()
        .filter(|e| e.label.as_deref() == Some(label))
        .map(|e| e.id)
        .collect()
}
