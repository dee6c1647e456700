use serde::{Deserialize, Serialize};

use super::Strategy;

/// Work attributed to one pack node (or, for separate execution, one query).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCounters {
    /// `execute_qp` invocations on the node.
    pub entries: u64,
    /// Requests for the next solution of the node's conjunction.
    pub next_calls: u64,
    /// Solutions the conjunction produced.
    pub solutions: u64,
    /// Literal calls: one per fact-store lookup or builtin evaluation.
    pub literal_calls: u64,
    /// Candidate facts or clause heads tried, plus builtin evaluations.
    pub attempts: u64,
}

impl NodeCounters {
    /// Work units: one per literal call plus one per resolution attempt.
    pub fn work(&self) -> u64 {
        self.literal_calls + self.attempts
    }

    fn add(&mut self, o: &NodeCounters) {
        self.entries += o.entries;
        self.next_calls += o.next_calls;
        self.solutions += o.solutions;
        self.literal_calls += o.literal_calls;
        self.attempts += o.attempts;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalCounters {
    pub literal_calls: u64,
    pub fact_lookups: u64,
    pub unification_attempts: u64,
    pub builtin_evals: u64,
    pub rule_expansions: u64,
    pub leaf_successes: u64,
    pub examples: u64,
}

impl GlobalCounters {
    fn add(&mut self, o: &GlobalCounters) {
        self.literal_calls += o.literal_calls;
        self.fact_lookups += o.fact_lookups;
        self.unification_attempts += o.unification_attempts;
        self.builtin_evals += o.builtin_evals;
        self.rule_expansions += o.rule_expansions;
        self.leaf_successes += o.leaf_successes;
        self.examples += o.examples;
    }
}

/// Instrumentation of one evaluation run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCounters {
    pub strategy: Option<Strategy>,
    /// Per node in depth-first pre-order; per query for separate execution.
    pub nodes: Vec<NodeCounters>,
    /// Depth of each entry of `nodes`.
    pub node_depth: Vec<usize>,
    pub global: GlobalCounters,
    /// Disjoint runs only: work of query `i` spent at pack level `l`.
    pub query_level_work: Vec<Vec<u64>>,
}

impl WorkCounters {
    pub(crate) fn with_layout(strategy: Strategy, node_depth: Vec<usize>, queries: usize, levels: usize) -> Self {
        let query_level_work = if strategy == Strategy::Disjoint {
            vec![vec![0; levels]; queries]
        } else {
            Vec::new()
        };
        WorkCounters {
            strategy: Some(strategy),
            nodes: vec![NodeCounters::default(); node_depth.len()],
            node_depth,
            global: GlobalCounters::default(),
            query_level_work,
        }
    }

    pub fn total_work(&self) -> u64 {
        self.nodes.iter().map(NodeCounters::work).sum()
    }

    pub fn total_literal_calls(&self) -> u64 {
        self.nodes.iter().map(|n| n.literal_calls).sum()
    }

    /// Work summed over nodes of equal depth.
    pub fn level_work(&self) -> Vec<u64> {
        let levels = self.node_depth.iter().copied().max().map_or(0, |d| d + 1);
        let mut out = vec![0; levels];
        for (n, &d) in self.nodes.iter().zip(&self.node_depth) {
            out[d] += n.work();
        }
        out
    }

    /// Sums another run's counters into this one. Layouts must agree.
    pub fn merge(&mut self, other: &WorkCounters) {
        if self.nodes.is_empty() && self.node_depth.is_empty() {
            self.nodes = vec![NodeCounters::default(); other.nodes.len()];
            self.node_depth = other.node_depth.clone();
            self.strategy = other.strategy;
        }
        assert_eq!(self.nodes.len(), other.nodes.len(), "counter layouts differ");
        for (a, b) in self.nodes.iter_mut().zip(&other.nodes) {
            a.add(b);
        }
        self.global.add(&other.global);
        if self.query_level_work.is_empty() {
            self.query_level_work = vec![Vec::new(); other.query_level_work.len()];
        }
        for (a, b) in self.query_level_work.iter_mut().zip(&other.query_level_work) {
            if a.len() < b.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("counters serialize")
    }
}

/// Summary of a [`WorkCounters`] value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkReport {
    pub strategy: Option<Strategy>,
    pub total_work: u64,
    pub literal_calls: u64,
    pub global: GlobalCounters,
    /// Work per depth, summed over nodes.
    pub level_work: Vec<u64>,
    /// Number of nodes per depth.
    pub level_nodes: Vec<usize>,
    pub nodes: Vec<NodeCounters>,
}

pub fn work_report(c: &WorkCounters) -> WorkReport {
    let level_work = c.level_work();
    let mut level_nodes = vec![0; level_work.len()];
    for &d in &c.node_depth {
        level_nodes[d] += 1;
    }
    WorkReport {
        strategy: c.strategy,
        total_work: c.total_work(),
        literal_calls: c.total_literal_calls(),
        global: c.global,
        level_work,
        level_nodes,
        nodes: c.nodes.clone(),
    }
}

/// Control events recorded by a traced packed or disjoint run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    /// Start of a fresh pack-state epoch for the example at this position.
    Epoch { example: usize },
    Enter { node: u32 },
    NextCall { node: u32 },
    Solution { node: u32 },
    Removed { node: u32 },
    LeafSuccess { query: usize },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_counters_are_zero() {
        let c = WorkCounters::with_layout(Strategy::Packed, vec![0, 1, 1], 2, 2);
        let r = work_report(&c);
        assert_eq!(r.total_work, 0);
        assert_eq!(r.level_work, vec![0, 0]);
        assert_eq!(r.level_nodes, vec![1, 2]);
        assert_eq!(r.global, GlobalCounters::default());
    }

    #[test]
    fn merge_sums_fields() {
        let mut a = WorkCounters::with_layout(Strategy::Disjoint, vec![0, 1], 1, 2);
        a.nodes[1].attempts = 3;
        a.query_level_work[0][1] = 4;
        let mut b = a.clone();
        b.global.leaf_successes = 2;
        a.merge(&b);
        assert_eq!(a.nodes[1].attempts, 6);
        assert_eq!(a.query_level_work[0][1], 8);
        assert_eq!(a.global.leaf_successes, 2);
        let json = a.to_json();
        let back: WorkCounters = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }
}
