//! Keyed examples: one query pack about family relations, evaluated under
//! all three strategies on a database whose examples are people.

use querypack::datastore::load_program;
use querypack::engine::{evaluate_pack_on_examples, Strategy};
use querypack::packtree::parse_pack_file;

const FAMILY: &str = "\
#key 1
parent(ann,bob). parent(bob,cal). parent(bob,dee). parent(eve,fay).
parent(fay,gus). parent(cal,hal).
male(ann). male(bob). male(cal). male(eve). male(hal).
#example 1 key(ann).
#example 2 key(bob).
#example 3 key(dee).
#example 4 key(eve).
#example 5 key(fay).
";

// Grandfather, grandparent, father and parent of a male child, sharing
// `parent(P,C)` once per example.
const PACK: &str = "\
#key P
parent(P,C), (parent(C,G), (male(P) or true) or male(P) or male(C))
";

fn main() {
    let db = load_program(FAMILY).expect("family database");
    let file = parse_pack_file(PACK).expect("pack");
    let names = ["grandfather", "grandparent", "father", "parent of a son"];
    for strategy in Strategy::ALL {
        let (rs, counters) = evaluate_pack_on_examples(&file.pack, &db, &file.key, strategy).expect("evaluation");
        println!("{:<9} work {:>4}", strategy, counters.total_work());
        if strategy == Strategy::Packed {
            for (q, name) in names.iter().enumerate() {
                let who: Vec<u64> = rs.covered(q).into_iter().map(|e| rs.example_ids()[e]).collect();
                println!("  {:<16} examples {:?}", name, who);
            }
        }
    }
}
