//! Example-partitioned evaluation on several threads gives the same result
//! set and the same counted work as a single worker.

use std::time::Instant;

use querypack::bongard::{bias_text, generate, Complexity};
use querypack::datastore::Conjunction;
use querypack::engine::{evaluate_pack_parallel, Strategy};
use querypack::miner::{build_broom, parse_bias};

fn main() {
    let set = generate(2000, Complexity::Simple, 8);
    let bias = parse_bias(&bias_text("medium").unwrap()).unwrap();
    let pack = build_broom(&Conjunction::new(set.rule.atoms[..1].to_vec()), &[], &bias, 1).unwrap();
    let mut first = None;
    for workers in [1, 2, 4] {
        let t = Instant::now();
        let (rs, c) = evaluate_pack_parallel(&pack, &set.db, &[], Strategy::Packed, workers).unwrap();
        println!("{} worker(s): work {} in {:.3}s", workers, c.total_work(), t.elapsed().as_secs_f64());
        match &first {
            None => first = Some((rs, c.total_work())),
            Some((r0, w0)) => assert!(*r0 == rs && *w0 == c.total_work()),
        }
    }
}
