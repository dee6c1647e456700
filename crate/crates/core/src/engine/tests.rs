use super::*;
use crate::datastore::{load_program, parse_conjunction, Conjunction, Database, Example, VarScope};
use crate::packtree::{build_pack, parse_pack, parse_pack_file, QueryPack};
use crate::synth::{random_instance, RandomLimits};

fn interp(facts: &str) -> Database {
    load_program(&format!("{}\n#example 0 key().", facts)).unwrap()
}

const EX2: &str = "p(1). p(2). q(1). r(2).";

#[test]
fn cut_scope_regression() {
    let db = interp(EX2);
    let pack = parse_pack("p(X), (q(X) or r(X))").unwrap();
    let mut ev = PackEvaluator::new(&pack, &db, &[], Strategy::Packed).unwrap();
    ev.enable_trace();
    assert_eq!(ev.evaluate_example(0).unwrap(), [true, true]);
    let c = ev.counters().clone();
    // Root: two solutions, never a third request.
    assert_eq!(c.nodes[0].solutions, 2);
    assert_eq!(c.nodes[0].next_calls, 2);
    // q is entered once (succeeds at X=1); r fails at X=1 and succeeds at X=2.
    assert_eq!((c.nodes[1].entries, c.nodes[2].entries), (1, 2));
    use TraceEvent::*;
    assert_eq!(
        ev.take_trace(),
        [
            Epoch { example: 0 },
            Enter { node: 0 },
            NextCall { node: 0 },
            Solution { node: 0 },
            Enter { node: 1 },
            NextCall { node: 1 },
            Solution { node: 1 },
            LeafSuccess { query: 0 },
            Removed { node: 1 },
            Enter { node: 2 },
            NextCall { node: 2 },
            NextCall { node: 0 },
            Solution { node: 0 },
            Enter { node: 2 },
            NextCall { node: 2 },
            Solution { node: 2 },
            LeafSuccess { query: 1 },
            Removed { node: 2 },
        ]
    );

    // Oracle: each full query on its own.
    let qs = pack.queries_by_id();
    let (bits, _) = evaluate_separate(&qs, Some(&db.examples.examples[0]), &db, &[]).unwrap();
    assert_eq!(bits, [true, true]);
}

#[test]
fn failing_single_leaf() {
    let db = interp(EX2);
    let pack = parse_pack("p(X), X < 1").unwrap();
    let (bits, c) = evaluate_packed(&pack, Some(&db.examples.examples[0]), &db, &[]).unwrap();
    assert_eq!(bits, [false]);
    assert_eq!(c.global.leaf_successes, 0);
}

fn fig1_pack() -> QueryPack {
    let mut scope = VarScope::new();
    let qs: Vec<Conjunction> = [
        "p(X)",
        "p(X), q(X,a)",
        "p(X), q(X,b)",
        "p(X), q(X,Y), t(X)",
        "p(X), q(X,Y), t(X), r(Y,1)",
    ]
    .iter()
    .map(|t| Conjunction::new(parse_conjunction(t, &mut scope).unwrap()))
    .collect();
    build_pack(&qs).unwrap()
}

#[test]
fn figure_one_without_q_a() {
    let db = interp("p(1). p(2). q(1,b). q(2,c). t(2). r(c,1).");
    let pack = fig1_pack();
    let e = &db.examples.examples[0];
    let (packed, _) = evaluate_packed(&pack, Some(e), &db, &[]).unwrap();
    let (sep, _) = evaluate_separate(&pack.queries_by_id(), Some(e), &db, &[]).unwrap();
    assert_eq!(packed, [true, false, true, true, true]);
    assert_eq!(packed, sep);
}

#[test]
fn separate_edge_cases() {
    let db = interp(EX2);
    let e = Some(&db.examples.examples[0]);
    let (bits, _) = evaluate_separate(&[], e, &db, &[]).unwrap();
    assert!(bits.is_empty());
    let (bits, _) = evaluate_separate(&[Conjunction::empty()], e, &db, &[]).unwrap();
    assert_eq!(bits, [true]);
}

#[test]
fn disjoint_recomputes_the_root() {
    let db = interp("p(1). p(2). q(1,a). q(2,b). t(1). r(a,1).");
    let pack = fig1_pack();
    let e = Some(&db.examples.examples[0]);
    let (bits, c) = evaluate_disjoint(&pack, e, &db, &[]).unwrap();
    let (sep, sc) = evaluate_separate(&pack.queries_by_id(), e, &db, &[]).unwrap();
    assert_eq!(bits, sep);
    // Every query calls p(X) once in separate runs; disjoint runs repeat the
    // root once per leaf.
    let single = evaluate_separate(&[pack.queries_by_id()[0].clone()], e, &db, &[]).unwrap().1;
    assert_eq!(single.nodes[0].literal_calls, 1);
    assert_eq!(c.nodes[0].literal_calls, pack.query_count as u64 * single.nodes[0].literal_calls);
    // Without sharing, the total work is the same as running each query alone.
    assert_eq!(c.total_work(), sc.total_work());
    let per_query: Vec<u64> = c.query_level_work.iter().map(|l| l.iter().sum()).collect();
    let sep_per_query: Vec<u64> = sc.nodes.iter().map(NodeCounters::work).collect();
    assert_eq!(per_query, sep_per_query);
}

#[test]
fn single_leaf_disjoint_equals_separate() {
    let db = interp(EX2);
    let pack = parse_pack("p(X), r(X)").unwrap();
    let e = Some(&db.examples.examples[0]);
    let (_, d) = evaluate_disjoint(&pack, e, &db, &[]).unwrap();
    let (_, s) = evaluate_separate(&pack.queries(), e, &db, &[]).unwrap();
    assert_eq!(d.nodes, s.nodes);
    assert_eq!(d.global, s.global);
}

const FAMILY: &str = "
parent(al, bea). parent(al, cy). parent(di, bea). parent(di, cy).
parent(bea, ed). parent(cy, fay).
male(al). male(cy). male(ed).
female(bea). female(di). female(fay).
";
const PEOPLE: [&str; 6] = ["al", "bea", "cy", "di", "ed", "fay"];

fn family_db() -> Database {
    let mut text = format!("#key 2\n{}", FAMILY);
    let mut id = 0;
    for x in PEOPLE {
        for y in PEOPLE {
            text.push_str(&format!("#example {} key({},{}).\n", id, x, y));
            id += 1;
        }
    }
    load_program(&text).unwrap()
}

#[test]
fn grandparents_by_key() {
    let db = family_db();
    let file = parse_pack_file("#key X, Y\nparent(X,Z), parent(Z,Y), (male(X) or female(X))").unwrap();
    for strategy in Strategy::ALL {
        let (rs, _) = evaluate_pack_on_examples(&file.pack, &db, &file.key, strategy).unwrap();
        // Oracle: all ground (X, Z, Y) triples.
        let parent = |a: &str, b: &str| FAMILY.contains(&format!("parent({}, {})", a, b));
        let gender = |a: &str, g: &str| FAMILY.split_whitespace().any(|f| f == format!("{}({}).", g, a));
        let mut e = 0;
        for x in PEOPLE {
            for y in PEOPLE {
                let gp = PEOPLE.iter().any(|z| parent(x, z) && parent(z, y));
                assert_eq!(rs.get(0, e), gp && gender(x, "male"), "{} {}", x, y);
                assert_eq!(rs.get(1, e), gp && gender(x, "female"), "{} {}", x, y);
                e += 1;
            }
        }
        assert_eq!(rs.count(0) + rs.count(1), 4);
    }
}

#[test]
fn key_arity_is_checked() {
    let db = family_db();
    let pack = parse_pack("parent(X,Y)").unwrap();
    let err = evaluate_pack_on_examples(&pack, &db, &[], Strategy::Packed).unwrap_err();
    assert_eq!(err, EvalError::KeyArityMismatch { expected: 2, found: 0 });
}

#[test]
fn zero_examples() {
    let db = load_program("p(1).").unwrap();
    let pack = parse_pack("p(X)").unwrap();
    let (rs, c) = evaluate_pack_on_examples(&pack, &db, &[], Strategy::Packed).unwrap();
    assert_eq!((rs.query_count(), rs.example_count()), (1, 0));
    assert_eq!(c.total_work(), 0);
}

#[test]
fn errors_name_the_example_and_abort() {
    let db = load_program("#key 0\n#example 4 key().\nn(1).\n#example 9 key().\nm(1).").unwrap();
    let pack = parse_pack("(n(X) or m(X), X < Y)").unwrap();
    for s in Strategy::ALL {
        let err = evaluate_pack_on_examples(&pack, &db, &[], s).unwrap_err();
        assert_eq!(err.to_string(), "example 9: comparison on an unbound variable in `1 < Y`");
        let par = evaluate_pack_parallel(&pack, &db, &[], s, 2).unwrap_err();
        assert_eq!(par, err);
    }
}

#[test]
fn report_linearity() {
    let db = interp(EX2);
    let q = Conjunction::new(parse_conjunction("p(X), r(X)", &mut VarScope::new()).unwrap());
    let e = Some(&db.examples.examples[0]);
    let one = work_report(&evaluate_separate(std::slice::from_ref(&q), e, &db, &[]).unwrap().1);
    let five = work_report(&evaluate_separate(&vec![q; 5], e, &db, &[]).unwrap().1);
    assert_eq!(five.literal_calls, 5 * one.literal_calls);
    assert_eq!(five.total_work, 5 * one.total_work);
}

#[test]
fn counters_serialize() {
    let db = interp(EX2);
    let pack = fig1_pack();
    let (_, c) = evaluate_pack_on_examples(&pack, &db, &[], Strategy::Packed).unwrap();
    let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    assert_eq!(v["strategy"], "packed");
    assert_eq!(v["nodes"].as_array().unwrap().len(), 7);
    let r = work_report(&c);
    assert_eq!(r.level_nodes, [1, 4, 2]);
}

fn run_all(inst: &crate::synth::RandomInstance) -> Vec<(ResultSet, WorkCounters)> {
    Strategy::ALL
        .iter()
        .map(|&s| evaluate_pack_on_examples(&inst.pack, &inst.db, &inst.key, s).unwrap())
        .collect()
}

#[test]
fn strategies_agree_on_random_instances() {
    for seed in 0..300 {
        let inst = random_instance(seed, RandomLimits::default());
        let runs = run_all(&inst);
        assert_eq!(runs[0].0, runs[1].0, "separate vs disjoint, seed {}", seed);
        assert_eq!(runs[0].0, runs[2].0, "separate vs packed, seed {}", seed);
        let (d, p) = (&runs[1].1, &runs[2].1);
        assert!(p.total_work() <= d.total_work(), "seed {}", seed);
        assert!(p.total_literal_calls() <= d.total_literal_calls(), "seed {}", seed);
    }
}

#[test]
fn pruning_invariants_on_random_instances() {
    for seed in 0..300 {
        let inst = random_instance(seed, RandomLimits::default());
        let mut ev = PackEvaluator::new(&inst.pack, &inst.db, &inst.key, Strategy::Packed).unwrap();
        ev.enable_trace();
        for e in 0..inst.db.examples.len() {
            ev.evaluate_example(e).unwrap();
        }
        let trace = ev.take_trace();
        let v = pruning_violations(&inst.pack, &trace);
        assert!(v.is_empty(), "seed {}: {:?}", seed, v);
    }
}

#[test]
fn the_audit_catches_a_broken_trace() {
    let pack = parse_pack("p(X), (q(X) or r(X))").unwrap();
    use TraceEvent::*;
    let bad = [
        Epoch { example: 0 },
        LeafSuccess { query: 0 },
        Removed { node: 1 },
        Solution { node: 1 },
        LeafSuccess { query: 0 },
        Removed { node: 2 },
        NextCall { node: 0 },
    ];
    assert_eq!(pruning_violations(&pack, &bad).len(), 3);
}

#[test]
fn repeated_examples_give_identical_results() {
    for seed in 0..100 {
        let inst = random_instance(seed, RandomLimits::default());
        for strategy in [Strategy::Packed, Strategy::Disjoint] {
            let mut ev = PackEvaluator::new(&inst.pack, &inst.db, &inst.key, strategy).unwrap();
            for e in 0..inst.db.examples.len() {
                let before = ev.counters().clone();
                let a = ev.evaluate_example(e).unwrap();
                let mid = ev.counters().clone();
                let b = ev.evaluate_example(e).unwrap();
                assert_eq!(a, b);
                let d1: Vec<u64> = mid.nodes.iter().zip(&before.nodes).map(|(x, y)| x.work() - y.work()).collect();
                let d2: Vec<u64> = ev.counters().nodes.iter().zip(&mid.nodes).map(|(x, y)| x.work() - y.work()).collect();
                assert_eq!(d1, d2, "seed {}", seed);
            }
        }
    }
}

#[test]
fn parallel_matches_sequential() {
    for seed in 0..60 {
        let inst = random_instance(seed, RandomLimits::default());
        for s in Strategy::ALL {
            let seq = evaluate_pack_on_examples(&inst.pack, &inst.db, &inst.key, s).unwrap();
            for workers in [1, 3, 8] {
                let par = evaluate_pack_parallel(&inst.pack, &inst.db, &inst.key, s, workers).unwrap();
                assert_eq!(par, seq, "seed {} workers {}", seed, workers);
            }
        }
    }
}

#[test]
fn background_only_evaluation() {
    let db = load_program(EX2).unwrap();
    let pack = parse_pack("p(X), (q(X) or r(X))").unwrap();
    let mut ev = PackEvaluator::new(&pack, &db, &[], Strategy::Packed).unwrap();
    assert_eq!(ev.evaluate_background().unwrap(), [true, true]);
    let e = Example::new(0, vec![]);
    let (bits, _) = evaluate_packed(&pack, Some(&e), &db, &[]).unwrap();
    assert_eq!(bits, [true, true]);
}
