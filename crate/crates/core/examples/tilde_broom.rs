//! Refinement brooms with lookahead on generated Bongard scenes: the
//! counted gain of packed over one-query-at-a-time evaluation grows with
//! the lookahead.

use querypack::bongard::{bias_text, generate, Complexity};
use querypack::datastore::Conjunction;
use querypack::engine::{evaluate_pack_on_examples, Strategy};
use querypack::miner::{build_broom, parse_bias};

fn main() {
    let set = generate(300, Complexity::Simple, 1);
    let bias = parse_bias(&bias_text("small").unwrap()).unwrap();
    let stick = Conjunction::new(set.rule.atoms[..1].to_vec());
    println!("planted rule {}, stick {}", set.rule, stick);
    for lookahead in 0..3 {
        let pack = build_broom(&stick, &[], &bias, lookahead).unwrap();
        let (a, dj) = evaluate_pack_on_examples(&pack, &set.db, &[], Strategy::Disjoint).unwrap();
        let (b, pk) = evaluate_pack_on_examples(&pack, &set.db, &[], Strategy::Packed).unwrap();
        assert_eq!(a, b);
        println!(
            "lookahead {}: {:>4} refinements, bf {:>2}, work {:>9} vs {:>8}, speedup {:.2}",
            lookahead,
            pack.query_count,
            pack.max_branching,
            dj.total_work(),
            pk.total_work(),
            dj.total_work() as f64 / pk.total_work() as f64
        );
    }
}
