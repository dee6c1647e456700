//! Backtracking evaluation of conjunctions and of whole query packs.
//!
//! Three strategies produce the same result set. `Separate` runs each query
//! on its own until its first solution. `Disjoint` walks the pack once per
//! query, so shared prefixes are recomputed. `Packed` walks the pack once
//! per example and prunes every branch whose queries have all succeeded.

mod audit;
mod bindings;
mod counters;
mod cursor;
mod exec;
mod result;
mod state;

use serde::{Deserialize, Serialize};

pub use audit::pruning_violations;
pub use counters::{work_report, GlobalCounters, NodeCounters, TraceEvent, WorkCounters, WorkReport};
pub use cursor::{solutions, SolutionCursor};
pub use exec::{
    evaluate_disjoint, evaluate_pack_on_examples, evaluate_pack_parallel, evaluate_packed, evaluate_separate, PackEvaluator,
};
pub use result::{BitmapError, ResultSet};
pub use state::PackState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Separate,
    Disjoint,
    Packed,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Separate, Strategy::Disjoint, Strategy::Packed];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Separate => "separate",
            Strategy::Disjoint => "disjoint",
            Strategy::Packed => "packed",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown strategy `{}` (expected separate, disjoint or packed)", s))
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("comparison on an unbound variable in `{literal}`")]
    BuiltinMode { literal: String },
    #[error("key arity mismatch: expected {expected} key variables, found {found}")]
    KeyArityMismatch { expected: usize, found: usize },
    #[error("example {example}: {source}")]
    AtExample {
        example: u64,
        #[source]
        source: Box<EvalError>,
    },
}

impl EvalError {
    fn at_example(self, example: u64) -> EvalError {
        match self {
            e @ EvalError::AtExample { .. } => e,
            e => EvalError::AtExample {
                example,
                source: Box::new(e),
            },
        }
    }
}

#[cfg(test)]
mod tests;
