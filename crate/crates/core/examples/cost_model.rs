//! Predicted against counted speedups: a one-level broom and a complete
//! ternary pack, both with work fixed by construction.

use querypack::costmodel::{fit_from_counters, multi_level, one_level, one_level_from_counters, validate_bounds};
use querypack::engine::{evaluate_pack_on_examples, Strategy};
use querypack::synth::{broom, uniform_pack, BroomSpec};

fn main() {
    // 16 branches; the shared root costs far more than each branch.
    let w = broom(&BroomSpec::uniform(16, 200, 2), 1);
    let (_, dj) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Disjoint).unwrap();
    let (_, pk) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Packed).unwrap();
    let r = one_level(&one_level_from_counters(&dj).unwrap()).unwrap();
    println!("broom: c = {:.1}, K = {:.2}", r.c.unwrap(), r.k.unwrap());
    println!("  predicted {:.3}, counted {:.3}, bounds [{:?}, {:?}]", r.speedup, dj.total_work() as f64 / pk.total_work() as f64, r.lower, r.upper);
    println!("  {:?}", validate_bounds(dj.total_work() as f64, pk.total_work() as f64, &r));

    let w = uniform_pack(3, 2, &[40, 10, 3], 2);
    let (_, dj) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Disjoint).unwrap();
    let (_, pk) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Packed).unwrap();
    let params = fit_from_counters(&dj, &w.pack).unwrap();
    let r = multi_level(&params).unwrap();
    println!("ternary depth 2: per-level work {:?}", params.tbar);
    println!("  Ts {} (counted {}), Tp {} (counted {})", r.ts, dj.total_work(), r.tp, pk.total_work());
    println!("  per-level shared/private ratios {:?}", r.c_levels);
    println!("  speedup {:.3} in [{:?}, {:?}]", r.speedup, r.lower, r.upper);
}
