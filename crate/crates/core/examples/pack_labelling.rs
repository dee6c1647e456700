//! Building a pack from a flat query list, then labelling, printing and
//! serializing it.

use querypack::datastore::{parse_conjunction, Conjunction, VarScope};
use querypack::packtree::{build_pack, emit_pack, label_pack, validate_pack};

fn main() {
    let mut scope = VarScope::new();
    let queries: Vec<Conjunction> = [
        "p(X)",
        "p(X), q(X,a)",
        "p(X), q(X,b)",
        "p(X), q(X,Y), t(X)",
        "p(X), q(X,Y), t(X), r(Y,1)",
    ]
    .iter()
    .map(|t| Conjunction::new(parse_conjunction(t, &mut scope).unwrap()))
    .collect();

    let pack = label_pack(&build_pack(&queries).unwrap());
    println!("text form: {}", emit_pack(&pack));
    println!("queries {}, depth {}, bf {}", pack.query_count, pack.depth, pack.max_branching);
    assert!(validate_pack(&pack).is_empty());
    pack.root.walk(&mut |node, depth| {
        let l = node.labels.unwrap();
        println!("{:indent$}{:<28} qp={:?} child={} query={:?}", "", node.conj.to_string(), l.qp, l.child, l.query, indent = 2 * depth);
    });
    println!("{}", serde_json::to_string_pretty(&pack.to_json()).unwrap());
}
