//! Level-wise frequent-query mining over generated scenes, printing the
//! frequent queries and the per-level candidate counts.

use querypack::bongard::{generate, Complexity};
use querypack::miner::{key_vars, parse_bias, warmr_levelwise};

const BIAS: &str = "\
template circle/1 -
template triangle/1 -
template leftof/2 +,-
template in/2 +,-
template square/1 +
template circle/1 +
maxnewvars 1
";

fn main() {
    let set = generate(200, Complexity::Medium, 4);
    let bias = parse_bias(BIAS).unwrap();
    let run = warmr_levelwise(&bias, &set.db, &key_vars(0), 60, 3).unwrap();
    print!("{}", run.to_tsv());
    for l in &run.levels {
        println!("level {}: {} candidates, {} frequent, {} duplicates, {} pruned, work {}", l.level, l.candidates, l.frequent, l.duplicates, l.pruned, l.work);
    }
}
