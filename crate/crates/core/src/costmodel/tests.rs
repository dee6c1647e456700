use super::*;
use crate::engine::evaluate_pack_on_examples;
use crate::packtree::parse_pack;
use crate::synth::{broom, padding_work, uniform_pack, BroomSpec};
use proptest::prelude::{prop, prop_assert, prop_oneof, proptest, Just};
use proptest::strategy::Strategy as Gen;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn sixteen_equal_queries() {
    let p = OneLevelParams {
        t: vec![1000.0; 16],
        t_prime: vec![1.0; 16],
    };
    let r = one_level(&p).unwrap();
    assert_eq!((r.ts, r.tp), (16016.0, 1016.0));
    assert!(close(r.speedup, 16016.0 / 1016.0));
    assert!((r.speedup - 15.76).abs() < 0.01);
    assert_eq!(r.upper, Some(16.0));
    assert_eq!(r.k, Some(1.0));
}

#[test]
fn one_query_carrying_all_shared_work() {
    let p = OneLevelParams {
        t: vec![0.0, 0.0, 0.0, 12.0],
        t_prime: vec![1.0; 4],
    };
    let r = one_level(&p).unwrap();
    assert_eq!(r.k, Some(4.0));
    assert!(close(r.speedup, 1.0));
}

#[test]
fn single_query_has_no_speedup() {
    let r = one_level(&OneLevelParams {
        t: vec![7.0],
        t_prime: vec![3.0],
    })
    .unwrap();
    assert_eq!(r.ts, r.tp);
    assert!(close(r.speedup, 1.0));
}

#[test]
fn degenerate_one_level() {
    let r = one_level(&OneLevelParams {
        t: vec![2.0, 4.0],
        t_prime: vec![0.0, 0.0],
    })
    .unwrap();
    assert!(r.c.is_none() && r.upper.is_none());
    assert!(close(r.speedup, 6.0 / 4.0));
    assert_eq!(r.degenerate.len(), 1);
    assert!(one_level(&OneLevelParams {
        t: vec![1.0],
        t_prime: vec![],
    })
    .is_err());
    assert!(one_level(&OneLevelParams {
        t: vec![-1.0],
        t_prime: vec![1.0],
    })
    .is_err());
}

fn ml(b: usize, tbar: Vec<f64>) -> MultiLevelParams {
    MultiLevelParams {
        b,
        d: tbar.len() - 1,
        tbar,
        k: None,
        non_uniform: false,
    }
}

#[test]
fn binary_depth_two() {
    let r = multi_level(&ml(2, vec![1.0, 1.0, 1.0])).unwrap();
    assert_eq!((r.tp, r.ts), (7.0, 12.0));
    assert!(close(r.speedup, 12.0 / 7.0));
    assert!(close(r.lower.unwrap(), 12.0 / 7.0));
    assert_eq!(r.upper, Some(4.0));
}

#[test]
fn depth_zero() {
    let r = multi_level(&ml(3, vec![5.0])).unwrap();
    assert_eq!((r.tp, r.ts, r.speedup), (5.0, 5.0, 1.0));
    assert!(r.level_bounds.is_empty());
}

#[test]
fn dominant_root_approaches_full_fanout() {
    let r = multi_level(&ml(2, vec![1e6, 1.0, 1.0, 1.0])).unwrap();
    // Oracle by hand: Ts = 8 (1e6 + 3), Tp = 1e6 + 2 + 4 + 8.
    assert!(close(r.ts, 8.0 * (1e6 + 3.0)));
    assert!(close(r.tp, 1e6 + 14.0));
    assert!((r.speedup - 8.0).abs() < 1e-3);
    assert!(r.c_levels[0].unwrap() > 1e4);
}

#[test]
fn measured_k_raises_tp() {
    let mut p = ml(2, vec![1.0, 1.0, 1.0]);
    p.k = Some(vec![2.0, 1.5]);
    let r = multi_level(&p).unwrap();
    assert_eq!(r.tp, 2.0 + 2.0 * 1.5 + 4.0);
    p.k = Some(vec![1.0]);
    assert!(multi_level(&p).is_err());
}

#[test]
fn zero_denominators_are_flagged() {
    let r = multi_level(&ml(2, vec![1.0, 0.0, 0.0])).unwrap();
    assert!(r.c_levels.iter().all(Option::is_none));
    assert_eq!(r.degenerate.len(), 2);
    assert_eq!(r.lower, Some(1.0));
}

#[test]
fn fitted_uniform_broom() {
    let w = uniform_pack(4, 1, &[9, 2], 3);
    let (_, dj) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Disjoint).unwrap();
    let (_, pk) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Packed).unwrap();
    let fd = fit_from_counters(&dj, &w.pack).unwrap();
    assert_eq!((fd.b, fd.d, fd.non_uniform), (4, 1, false));
    assert_eq!(fd.tbar, vec![3.0 * padding_work(9), 3.0 * padding_work(2)]);
    assert_eq!(fd.k, Some(vec![1.0]));
    let fp = fit_from_counters(&pk, &w.pack).unwrap();
    assert_eq!(fp.tbar, fd.tbar);
    let pred = multi_level(&fd).unwrap();
    assert_eq!(pred.ts, dj.total_work() as f64);
    assert_eq!(pred.tp, pk.total_work() as f64);
    let v = validate_bounds(dj.total_work() as f64, pk.total_work() as f64, &pred);
    assert!(v.pass, "{:?}", v);

    let one = one_level(&one_level_from_counters(&dj).unwrap()).unwrap();
    assert!(close(one.speedup, pred.speedup));
}

#[test]
fn non_uniform_flag() {
    let pack = parse_pack("a(X), (b(X) or c(X), (d(X) or e(X)))").unwrap();
    let db = crate::datastore::load_program("a(1). b(1). c(1). d(1). e(1).\n#example 0 key().").unwrap();
    let (_, c) = evaluate_pack_on_examples(&pack, &db, &[], Strategy::Disjoint).unwrap();
    let f = fit_from_counters(&c, &pack).unwrap();
    assert!(f.non_uniform);
    let (_, s) = evaluate_pack_on_examples(&pack, &db, &[], Strategy::Separate).unwrap();
    assert!(matches!(fit_from_counters(&s, &pack), Err(CostError::WrongStrategy(_))));
}

#[test]
fn lopsided_broom_is_within_bounds() {
    let w = broom(&BroomSpec::lopsided(8, 40, 3, 1), 2);
    let (_, dj) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Disjoint).unwrap();
    let (_, pk) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Packed).unwrap();
    let p = one_level_from_counters(&dj).unwrap();
    let r = one_level(&p).unwrap();
    assert!(r.k.unwrap() > 4.0);
    // The one-level formulas are exact for brooms.
    assert_eq!(r.ts, dj.total_work() as f64);
    assert_eq!(r.tp, pk.total_work() as f64);
    let v = validate_bounds(r.ts, r.tp, &r);
    assert!(v.pass, "{:?}", v);
}

#[test]
fn corrupted_counters_fail() {
    let r = one_level(&OneLevelParams {
        t: vec![5.0; 4],
        t_prime: vec![1.0; 4],
    })
    .unwrap();
    let v = validate_bounds(10.0, 12.0, &r);
    assert!(!v.pass);
    assert!(v.diagnostics[0].contains("exceeds"));
    assert!(!validate_bounds(100.0, 1.0, &r).pass);
}

#[test]
fn report_serializes() {
    let r = multi_level(&ml(2, vec![1.0, 2.0])).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["r_table"][0][1], serde_json::json!(r.r_table[0][1].unwrap()));
}

fn work() -> impl Gen<Value = f64> {
    prop_oneof![Just(0.0), 0.0..1e4f64, 1e-3..10.0f64]
}

proptest! {
    #[test]
    fn speedup_formula_matches_raw_ratio(pairs in prop::collection::vec((work(), 1e-3..1e4f64), 1..40)) {
        let p = OneLevelParams {
            t: pairs.iter().map(|x| x.0).collect(),
            t_prime: pairs.iter().map(|x| x.1).collect(),
        };
        let r = one_level(&p).unwrap();
        prop_assert!(close(r.speedup, r.ts / r.tp), "{} vs {}", r.speedup, r.ts / r.tp);
        let n = pairs.len() as f64;
        let c = r.c.unwrap();
        prop_assert!(r.speedup >= 1.0 - 1e-12);
        prop_assert!(r.speedup <= (c + 1.0) / (c / n + 1.0) * (1.0 + 1e-12));
        prop_assert!(r.speedup <= (c + 1.0).min(n) * (1.0 + 1e-12));
        let k = r.k.unwrap();
        prop_assert!((1.0 - 1e-12..=n * (1.0 + 1e-12)).contains(&k));
    }

    #[test]
    fn r_coefficients_in_range(b in 1usize..5, tbar in prop::collection::vec(work(), 1..6)) {
        let d = tbar.len() - 1;
        for l in 0..=d {
            for m in l..=d {
                if let Some(r) = r_coefficient(b, &tbar, l, m) {
                    let hi = (b as f64).powi((m - l) as i32);
                    prop_assert!(r >= 1.0 - 1e-12 && r <= hi * (1.0 + 1e-12), "R({},{}) = {}", l, m, r);
                }
            }
        }
    }

    #[test]
    fn level_identity_equals_ratio(b in 1usize..5, tbar in prop::collection::vec(1e-3..1e3f64, 2..6)) {
        let r = multi_level(&ml(b, tbar)).unwrap();
        for x in r.level_bounds.iter().flatten() {
            prop_assert!(close(*x, r.speedup), "{} vs {}", x, r.speedup);
        }
        prop_assert!(r.speedup >= 1.0 - 1e-12 && r.speedup <= r.upper.unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn depth_one_reduces_to_one_level(b in 1usize..9, t0 in 1e-3..1e3f64, t1 in 1e-3..1e3f64) {
        let m = multi_level(&ml(b, vec![t0, t1])).unwrap();
        let o = one_level(&OneLevelParams { t: vec![t0; b], t_prime: vec![t1; b] }).unwrap();
        prop_assert!(close(m.ts, o.ts) && close(m.tp, o.tp) && close(m.speedup, o.speedup));
    }
}
