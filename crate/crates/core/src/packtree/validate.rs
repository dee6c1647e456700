use std::fmt;

use super::{label_pack, PackNode, QueryPack};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Child positions from the root to the offending node.
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {:?}: {}", self.path, self.message)
    }
}

/// Checks the structural invariants of a pack; an empty list means valid.
pub fn validate_pack(pack: &QueryPack) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut ids = Vec::new();
    let mut labelled = 0;
    let mut nodes = 0;
    check_node(&pack.root, &mut Vec::new(), &mut out, &mut ids, &mut labelled, &mut nodes);

    let leaves = pack.root.leaf_count();
    if pack.query_count != leaves {
        out.push(root_violation(format!(
            "query count {} but {} leaves",
            pack.query_count, leaves
        )));
    }
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    if sorted != (0..ids.len()).collect::<Vec<_>>() {
        out.push(root_violation(format!("leaf query ids {:?} are not 0..{}", ids, ids.len())));
    }
    if pack.depth != pack.root.height() {
        out.push(root_violation(format!(
            "depth {} but tree height {}",
            pack.depth,
            pack.root.height()
        )));
    }
    if pack.max_branching != pack.root.max_branching().max(1) {
        out.push(root_violation(format!(
            "max branching {} but recomputed {}",
            pack.max_branching,
            pack.root.max_branching().max(1)
        )));
    }

    if labelled > 0 {
        if labelled != nodes {
            out.push(root_violation(format!("only {} of {} nodes are labelled", labelled, nodes)));
        } else {
            let expected = label_pack(pack);
            compare_labels(&pack.root, &expected.root, &mut Vec::new(), &mut out);
        }
    }
    out
}

fn root_violation(message: String) -> Violation {
    Violation {
        path: Vec::new(),
        message,
    }
}

fn check_node(
    n: &PackNode,
    path: &mut Vec<usize>,
    out: &mut Vec<Violation>,
    ids: &mut Vec<usize>,
    labelled: &mut usize,
    nodes: &mut usize,
) {
    *nodes += 1;
    if n.labels.is_some() {
        *labelled += 1;
    }
    match (n.is_leaf(), n.leaf) {
        (true, Some(id)) => ids.push(id),
        (true, None) => out.push(Violation {
            path: path.clone(),
            message: "leaf without a query id".into(),
        }),
        (false, Some(id)) => out.push(Violation {
            path: path.clone(),
            message: format!("node with children also carries query id {}", id),
        }),
        (false, None) => {}
    }
    for (i, c) in n.children.iter().enumerate() {
        path.push(i);
        check_node(c, path, out, ids, labelled, nodes);
        path.pop();
    }
}

fn compare_labels(actual: &PackNode, expected: &PackNode, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    if actual.labels != expected.labels {
        let what = if actual.is_leaf() {
            "leaf numbers are not left-to-right"
        } else {
            "pack numbers are not depth-first"
        };
        out.push(Violation {
            path: path.clone(),
            message: format!("{}: found {:?}, expected {:?}", what, actual.labels, expected.labels),
        });
    }
    for (i, (a, e)) in actual.children.iter().zip(&expected.children).enumerate() {
        path.push(i);
        compare_labels(a, e, path, out);
        path.pop();
    }
}
