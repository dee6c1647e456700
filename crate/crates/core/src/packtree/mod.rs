//! Query-pack trees: construction from flat query sets, labelling,
//! validation and the text/JSON forms.

mod build;
mod label;
mod syntax;
mod validate;

use std::fmt;

use serde::Serialize;

use crate::datastore::{Conjunction, ParseError};

pub use build::build_pack;
pub use label::label_pack;
pub use syntax::{emit_pack, parse_pack, parse_pack_file, PackFile};
pub use validate::{validate_pack, Violation};

#[derive(Debug, thiserror::Error)]
pub enum PackError {
    #[error("cannot build a pack from an empty query set")]
    EmptyInput,
    #[error("pack syntax error at {0}")]
    Parse(#[from] ParseError),
}

/// Query-pack, query and child numbers of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Labels {
    /// Depth-first number of a non-leaf node; `None` on leaves.
    pub qp: Option<u32>,
    /// Pack number of the parent; 0 for the root.
    pub parent_qp: u32,
    /// Position among the parent's children, from 1.
    pub child: u32,
    /// Left-to-right leaf number, from 1; `None` on interior nodes.
    pub query: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackNode {
    pub conj: Conjunction,
    pub children: Vec<PackNode>,
    /// Index of the query in the input set; present exactly on leaves.
    pub leaf: Option<usize>,
    pub labels: Option<Labels>,
}

impl PackNode {
    pub fn leaf(conj: Conjunction, query: usize) -> PackNode {
        PackNode {
            conj,
            children: Vec::new(),
            leaf: Some(query),
            labels: None,
        }
    }

    pub fn branch(conj: Conjunction, children: Vec<PackNode>) -> PackNode {
        PackNode {
            conj,
            children,
            leaf: None,
            labels: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(PackNode::leaf_count).sum()
        }
    }

    /// Edges on the longest path down to a leaf.
    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    pub fn max_branching(&self) -> usize {
        self.children
            .iter()
            .map(PackNode::max_branching)
            .max()
            .unwrap_or(0)
            .max(self.children.len())
    }

    /// Visits nodes in depth-first pre-order with their depth.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a PackNode, usize)) {
        fn go<'a>(n: &'a PackNode, depth: usize, f: &mut impl FnMut(&'a PackNode, usize)) {
            f(n, depth);
            for c in &n.children {
                go(c, depth + 1, f);
            }
        }
        go(self, 0, f);
    }

    fn collect_queries(&self, prefix: &Conjunction, out: &mut Vec<(usize, Conjunction)>) {
        let here = prefix.concat(&self.conj);
        match self.leaf {
            Some(id) if self.is_leaf() => out.push((id, here)),
            _ => {
                for c in &self.children {
                    c.collect_queries(&here, out);
                }
            }
        }
    }
}

/// A rooted pack with its summary statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryPack {
    pub root: PackNode,
    pub query_count: usize,
    /// Largest child count of any node ("bf"); 1 for a single-query pack.
    pub max_branching: usize,
    pub depth: usize,
}

impl QueryPack {
    pub fn new(root: PackNode) -> QueryPack {
        let query_count = root.leaf_count();
        let max_branching = root.max_branching().max(1);
        let depth = root.height();
        QueryPack {
            root,
            query_count,
            max_branching,
            depth,
        }
    }

    /// Node reached by following child positions from the root.
    pub fn node(&self, path: &[usize]) -> Option<&PackNode> {
        let mut n = &self.root;
        for &i in path {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    /// Full queries through the node at `path`, left to right.
    pub fn dependent_queries(&self, path: &[usize]) -> Option<Vec<Conjunction>> {
        Some(self.dependents_with_ids(path)?.into_iter().map(|(_, q)| q).collect())
    }

    /// Like [`QueryPack::dependent_queries`], paired with each leaf's query id.
    pub fn dependents_with_ids(&self, path: &[usize]) -> Option<Vec<(usize, Conjunction)>> {
        let mut prefix = Conjunction::empty();
        let mut n = &self.root;
        for &i in path {
            prefix = prefix.concat(&n.conj);
            n = n.children.get(i)?;
        }
        let mut out = Vec::new();
        n.collect_queries(&prefix, &mut out);
        Some(out)
    }

    /// All member queries in leaf order.
    pub fn queries(&self) -> Vec<Conjunction> {
        self.dependent_queries(&[]).unwrap_or_default()
    }

    /// Member queries indexed by their query id.
    pub fn queries_by_id(&self) -> Vec<Conjunction> {
        let mut pairs = self.dependents_with_ids(&[]).unwrap_or_default();
        pairs.sort_by_key(|(id, _)| *id);
        pairs.into_iter().map(|(_, q)| q).collect()
    }

    /// One more than the largest variable id used anywhere in the pack.
    pub fn var_bound(&self) -> u32 {
        let mut max = None;
        self.root.walk(&mut |n, _| {
            if let Some(m) = n.conj.max_var_id() {
                max = Some(max.map_or(m, |x: u32| x.max(m)));
            }
        });
        max.map_or(0, |m| m + 1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct JsonNode {
            conj: Vec<String>,
            qp: Option<u32>,
            ch: Option<u32>,
            q: Option<u32>,
            children: Vec<JsonNode>,
        }
        fn conv(n: &PackNode) -> JsonNode {
            JsonNode {
                conj: n.conj.atoms.iter().map(|a| a.to_string()).collect(),
                qp: n.labels.and_then(|l| l.qp),
                ch: n.labels.map(|l| l.child),
                q: n.labels.and_then(|l| l.query),
                children: n.children.iter().map(conv).collect(),
            }
        }
        serde_json::to_value(conv(&self.root)).expect("pack JSON is always representable")
    }
}

impl fmt::Display for QueryPack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_pack(self))
    }
}
