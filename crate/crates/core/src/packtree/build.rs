use crate::datastore::{Atom, Conjunction};

use super::{PackError, PackNode, QueryPack};

#[derive(Default)]
struct Trie {
    entries: Vec<Entry>,
}

enum Entry {
    Lit(Atom, Trie),
    End(usize),
}

impl Trie {
    fn insert(&mut self, atoms: &[Atom], id: usize) {
        let Some((first, rest)) = atoms.split_first() else {
            self.entries.push(Entry::End(id));
            return;
        };
        let pos = self
            .entries
            .iter()
            .position(|e| matches!(e, Entry::Lit(a, _) if a == first));
        let pos = match pos {
            Some(p) => p,
            None => {
                self.entries.push(Entry::Lit(first.clone(), Trie::default()));
                self.entries.len() - 1
            }
        };
        match &mut self.entries[pos] {
            Entry::Lit(_, t) => t.insert(rest, id),
            Entry::End(_) => unreachable!(),
        }
    }

    /// Converts to pack nodes, merging single-entry chains into one conjunction.
    fn into_node(self, mut prefix: Vec<Atom>) -> PackNode {
        let mut trie = self;
        loop {
            if trie.entries.len() != 1 {
                break;
            }
            match trie.entries.pop().unwrap() {
                Entry::End(id) => return PackNode::leaf(Conjunction::new(prefix), id),
                Entry::Lit(a, t) => {
                    prefix.push(a);
                    trie = t;
                }
            }
        }
        let children = trie
            .entries
            .into_iter()
            .map(|e| match e {
                Entry::End(id) => PackNode::leaf(Conjunction::empty(), id),
                Entry::Lit(a, t) => t.into_node(vec![a]),
            })
            .collect();
        PackNode::branch(Conjunction::new(prefix), children)
    }
}

/// Merges queries into the maximal shared-prefix tree. Sharing is literal by
/// literal, including variable identity. A query that is a strict prefix of
/// another ends in a leaf with an empty conjunction. Leaf ids are the input
/// positions.
pub fn build_pack(queries: &[Conjunction]) -> Result<QueryPack, PackError> {
    if queries.is_empty() {
        return Err(PackError::EmptyInput);
    }
    let mut trie = Trie::default();
    for (i, q) in queries.iter().enumerate() {
        trie.insert(&q.atoms, i);
    }
    Ok(QueryPack::new(trie.into_node(Vec::new())))
}
