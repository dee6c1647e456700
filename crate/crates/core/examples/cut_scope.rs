//! The smallest pack where pruning matters: after `q(1)` succeeds its
//! branch is removed, so backtracking into `p(X)` only serves `r(X)`.

use querypack::datastore::load_program;
use querypack::engine::{PackEvaluator, Strategy};
use querypack::packtree::parse_pack;

fn main() {
    let db = load_program("p(1). p(2). q(1). r(2).\n#example 0 key().").unwrap();
    let pack = parse_pack("p(X), (q(X) or r(X))").unwrap();
    let mut ev = PackEvaluator::new(&pack, &db, &[], Strategy::Packed).unwrap();
    ev.enable_trace();
    let hits = ev.evaluate_example(0).unwrap();
    println!("hits: {:?}", hits);
    for event in ev.take_trace() {
        println!("  {:?}", event);
    }
    let root = &ev.counters().nodes[0];
    println!("root solutions {}, next calls {}", root.solutions, root.next_calls);
}
