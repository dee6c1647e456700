use std::collections::HashSet;

use crate::packtree::QueryPack;

use super::state::FlatPack;
use super::TraceEvent;

/// Checks a packed-run trace for pruning violations: a leaf reporting twice
/// in one example, a solution of a node after it was removed, or a request
/// for another root solution after all root children were removed.
pub fn pruning_violations(pack: &QueryPack, trace: &[TraceEvent]) -> Vec<String> {
    let flat = FlatPack::new(pack);
    let root_children = flat.nodes[0].children.len();
    let mut out = Vec::new();
    let mut example = None;
    let mut removed: HashSet<u32> = HashSet::new();
    let mut reported: HashSet<usize> = HashSet::new();
    let mut root_removed = 0;
    for ev in trace {
        match *ev {
            TraceEvent::Epoch { example: e } => {
                example = Some(e);
                removed.clear();
                reported.clear();
                root_removed = 0;
            }
            TraceEvent::LeafSuccess { query } => {
                if !reported.insert(query) {
                    out.push(format!("example {:?}: query {} reported twice", example, query));
                }
            }
            TraceEvent::Solution { node } => {
                let mut n = Some(node);
                while let Some(x) = n {
                    if removed.contains(&x) {
                        out.push(format!("example {:?}: node {} produced a solution after node {} was removed", example, node, x));
                        break;
                    }
                    n = flat.nodes[x as usize].parent;
                }
            }
            TraceEvent::Removed { node } => {
                removed.insert(node);
                if flat.nodes[node as usize].parent == Some(0) {
                    root_removed += 1;
                }
            }
            TraceEvent::NextCall { node: 0 } if root_children > 0 && root_removed == root_children => {
                out.push(format!("example {:?}: root asked for another solution after all children were removed", example));
            }
            TraceEvent::NextCall { .. } | TraceEvent::Enter { .. } => {}
        }
    }
    out
}
