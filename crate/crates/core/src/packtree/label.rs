use super::{Labels, PackNode, QueryPack};

/// Numbers non-leaf nodes depth first from the left starting at 1, leaves
/// left to right starting at 1, and every node by its position under its
/// parent. Idempotent.
pub fn label_pack(pack: &QueryPack) -> QueryPack {
    let mut out = pack.clone();
    let mut next_qp = 1;
    let mut next_query = 1;
    assign(&mut out.root, 0, 1, &mut next_qp, &mut next_query);
    out
}

fn assign(node: &mut PackNode, parent_qp: u32, child: u32, next_qp: &mut u32, next_query: &mut u32) {
    if node.is_leaf() {
        node.labels = Some(Labels {
            qp: None,
            parent_qp,
            child,
            query: Some(*next_query),
        });
        *next_query += 1;
        return;
    }
    let qp = *next_qp;
    *next_qp += 1;
    node.labels = Some(Labels {
        qp: Some(qp),
        parent_qp,
        child,
        query: None,
    });
    for (i, c) in node.children.iter_mut().enumerate() {
        assign(c, qp, i as u32 + 1, next_qp, next_query);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packtree::parse_pack;

    #[test]
    fn figure_three_numbering() {
        let pack = parse_pack("a, (b, (c or d or e) or f or g, (h or i or j))").unwrap();
        let pack = label_pack(&pack);
        let root = &pack.root;
        assert_eq!(root.labels.unwrap().qp, Some(1));
        assert_eq!(root.labels.unwrap().parent_qp, 0);
        let b = &root.children[0];
        let g = &root.children[2];
        assert_eq!(b.labels.unwrap().qp, Some(2));
        assert_eq!(g.labels.unwrap().qp, Some(3));
        let children: Vec<u32> = root.children.iter().map(|c| c.labels.unwrap().child).collect();
        assert_eq!(children, [1, 2, 3]);

        let mut leaves = Vec::new();
        pack.root.walk(&mut |n, _| {
            if n.is_leaf() {
                let l = n.labels.unwrap();
                leaves.push((n.conj.to_string(), l.query.unwrap(), l.parent_qp, l.child));
            }
        });
        // Same triples as the leaf(QpNbF, ChildNb, QueryNb) terms of the
        // labelled representation.
        let expected = [
            ("c", 1, 2, 1),
            ("d", 2, 2, 2),
            ("e", 3, 2, 3),
            ("f", 4, 1, 2),
            ("h", 5, 3, 1),
            ("i", 6, 3, 2),
            ("j", 7, 3, 3),
        ];
        let expected: Vec<(String, u32, u32, u32)> =
            expected.iter().map(|(c, q, p, ch)| (c.to_string(), *q, *p, *ch)).collect();
        assert_eq!(leaves, expected);
    }

    #[test]
    fn single_leaf() {
        let pack = label_pack(&parse_pack("p(X)").unwrap());
        let l = pack.root.labels.unwrap();
        assert_eq!((l.query, l.child, l.qp), (Some(1), 1, None));
    }

    #[test]
    fn relabelling_is_idempotent() {
        let pack = label_pack(&parse_pack("a, (b, (c or d) or e)").unwrap());
        assert_eq!(label_pack(&pack), pack);
    }
}
