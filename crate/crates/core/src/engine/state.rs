use crate::datastore::Atom;
use crate::packtree::{PackNode, QueryPack};

const NIL: u32 = u32::MAX;

pub(crate) struct FlatNode<'a> {
    pub conj: &'a [Atom],
    pub children: Vec<u32>,
    pub parent: Option<u32>,
    pub depth: usize,
    pub leaf: Option<usize>,
}

/// A pack in depth-first pre-order; node 0 is the root.
pub(crate) struct FlatPack<'a> {
    pub nodes: Vec<FlatNode<'a>>,
    /// Node index of each query's leaf, by query id.
    pub leaf_node: Vec<u32>,
    pub levels: usize,
}

impl<'a> FlatPack<'a> {
    pub(crate) fn new(pack: &'a QueryPack) -> FlatPack<'a> {
        fn go<'a>(n: &'a PackNode, parent: Option<u32>, depth: usize, out: &mut Vec<FlatNode<'a>>) -> u32 {
            let me = out.len() as u32;
            out.push(FlatNode {
                conj: &n.conj.atoms,
                children: Vec::new(),
                parent,
                depth,
                leaf: n.leaf,
            });
            for c in &n.children {
                let id = go(c, Some(me), depth + 1, out);
                out[me as usize].children.push(id);
            }
            me
        }
        let mut nodes = Vec::new();
        go(&pack.root, None, 0, &mut nodes);
        let mut leaf_node = vec![NIL; pack.query_count];
        for (i, n) in nodes.iter().enumerate() {
            if let Some(q) = n.leaf {
                leaf_node[q] = i as u32;
            }
        }
        let levels = nodes.iter().map(|n| n.depth).max().unwrap_or(0) + 1;
        FlatPack { nodes, leaf_node, levels }
    }

    pub(crate) fn depths(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.depth).collect()
    }

    /// Nodes from the root down to the query's leaf.
    pub(crate) fn path(&self, query: usize) -> Vec<u32> {
        let mut out = vec![self.leaf_node[query]];
        while let Some(p) = self.nodes[*out.last().unwrap() as usize].parent {
            out.push(p);
        }
        out.reverse();
        out
    }
}

/// Alive children of every pack node for the example being evaluated.
///
/// Each node owns an intrusive doubly linked list of its alive children.
/// Lists are rebuilt lazily: a list stamped with an older epoch is stale and
/// is restored from the original children on first access, so a reset costs
/// one increment.
#[derive(Clone, Debug)]
pub struct PackState {
    children: Vec<Vec<u32>>,
    epoch: u64,
    stamp: Vec<u64>,
    head: Vec<u32>,
    alive: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    removed_in: Vec<u64>,
    /// Restricts every list to nodes on one root-to-leaf path.
    only: Option<Vec<bool>>,
}

impl PackState {
    pub fn new(pack: &QueryPack) -> PackState {
        Self::from_flat(&FlatPack::new(pack))
    }

    pub(crate) fn from_flat(flat: &FlatPack<'_>) -> PackState {
        let n = flat.nodes.len();
        PackState {
            children: flat.nodes.iter().map(|x| x.children.clone()).collect(),
            epoch: 1,
            stamp: vec![0; n],
            head: vec![NIL; n],
            alive: vec![0; n],
            next: vec![NIL; n],
            prev: vec![NIL; n],
            removed_in: vec![0; n],
            only: None,
        }
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Starts a new epoch in which every child is alive again.
    pub fn reset(&mut self) {
        self.epoch += 1;
    }

    pub(crate) fn restrict(&mut self, path: Option<&[u32]>) {
        self.only = path.map(|p| {
            let mut mask = vec![false; self.children.len()];
            for &n in p {
                mask[n as usize] = true;
            }
            mask
        });
        self.reset();
    }

    fn ensure(&mut self, node: u32) {
        let i = node as usize;
        if self.stamp[i] == self.epoch {
            return;
        }
        self.stamp[i] = self.epoch;
        let mut last = NIL;
        let mut count = 0;
        self.head[i] = NIL;
        for &c in &self.children[i] {
            if self.only.as_ref().is_some_and(|m| !m[c as usize]) {
                continue;
            }
            self.prev[c as usize] = last;
            self.next[c as usize] = NIL;
            if last == NIL {
                self.head[i] = c;
            } else {
                self.next[last as usize] = c;
            }
            last = c;
            count += 1;
        }
        self.alive[i] = count;
    }

    pub(crate) fn first(&mut self, node: u32) -> Option<u32> {
        self.ensure(node);
        Some(self.head[node as usize]).filter(|&c| c != NIL)
    }

    pub(crate) fn next_sibling(&self, child: u32) -> Option<u32> {
        Some(self.next[child as usize]).filter(|&c| c != NIL)
    }

    pub(crate) fn remove(&mut self, parent: u32, child: u32) {
        self.ensure(parent);
        let (p, n) = (self.prev[child as usize], self.next[child as usize]);
        if p == NIL {
            self.head[parent as usize] = n;
        } else {
            self.next[p as usize] = n;
        }
        if n != NIL {
            self.prev[n as usize] = p;
        }
        self.alive[parent as usize] -= 1;
        self.removed_in[child as usize] = self.epoch;
    }

    pub(crate) fn is_empty(&mut self, node: u32) -> bool {
        self.ensure(node);
        self.alive[node as usize] == 0
    }

    /// Alive children of a node, in order.
    pub fn alive_children(&mut self, node: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut c = self.first(node);
        while let Some(x) = c {
            out.push(x);
            c = self.next_sibling(x);
        }
        out
    }

    /// Whether the node was pruned in the current epoch.
    pub fn is_removed(&self, node: u32) -> bool {
        self.removed_in[node as usize] == self.epoch
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packtree::parse_pack;

    #[test]
    fn removal_and_reset() {
        let pack = parse_pack("a, (b or c, (d or e) or f)").unwrap();
        let mut s = PackState::new(&pack);
        assert_eq!(s.alive_children(0), [1, 2, 5]);
        assert_eq!(s.alive_children(2), [3, 4]);
        s.remove(0, 2);
        assert_eq!(s.alive_children(0), [1, 5]);
        s.remove(0, 1);
        s.remove(0, 5);
        assert!(s.is_empty(0));
        assert!(s.is_removed(5));
        s.reset();
        assert_eq!(s.alive_children(0), [1, 2, 5]);
        assert!(!s.is_removed(5));
    }

    #[test]
    fn restriction_keeps_one_path() {
        let pack = parse_pack("a, (b or c, (d or e) or f)").unwrap();
        let flat = FlatPack::new(&pack);
        let mut s = PackState::from_flat(&flat);
        let path = flat.path(2);
        assert_eq!(path, [0, 2, 4]);
        s.restrict(Some(&path));
        assert_eq!(s.alive_children(0), [2]);
        assert_eq!(s.alive_children(2), [4]);
        s.restrict(None);
        assert_eq!(s.alive_children(2), [3, 4]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Random removals compared against a plain vector model.
            #[test]
            fn matches_vector_model(n in 1usize..8, ops in prop::collection::vec(0usize..16, 0..20), resets in 0usize..3) {
                let text = format!("r, ({})", (0..n.max(2)).map(|i| format!("c{}", i)).collect::<Vec<_>>().join(" or "));
                let pack = parse_pack(&text).unwrap();
                let mut s = PackState::new(&pack);
                for _ in 0..=resets {
                    s.reset();
                    let mut model: Vec<u32> = (1..=n.max(2) as u32).collect();
                    for &o in &ops {
                        if model.is_empty() {
                            break;
                        }
                        let victim = model.remove(o % model.len());
                        s.remove(0, victim);
                        prop_assert_eq!(s.alive_children(0), model.clone());
                    }
                }
            }
        }
    }
}
