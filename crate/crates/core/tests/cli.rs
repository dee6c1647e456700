use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn querypack(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_querypack"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

const EX2_DB: &str = "p(1). p(2). q(1). r(2).\n#example 0 key().\n";
const EX2_PACK: &str = "p(X), (q(X) or r(X))\n";

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ex2.db"), EX2_DB).unwrap();
    fs::write(dir.path().join("ex2.pack"), EX2_PACK).unwrap();
    dir
}

#[test]
fn generate_is_deterministic_and_loadable() {
    let dir = setup();
    for out in ["a.txt", "b.txt"] {
        ok(&querypack(&["generate-bongard", "--n", "10", "--complexity", "simple", "--seed", "7", "--out", out], dir.path()));
    }
    let a = fs::read(dir.path().join("a.txt")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.txt")).unwrap());
    let db = querypack::datastore::load_program(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(db.examples.len(), 10);
    let bad = querypack(&["generate-bongard", "--n", "0", "--out", "c.txt"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    let bad = querypack(&["generate-bongard", "--n", "3", "--complexity", "hard", "--out", "c.txt"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn run_writes_matching_results_for_every_strategy() {
    let dir = setup();
    let mut csv = Vec::new();
    let mut counters = Vec::new();
    for s in ["separate", "disjoint", "packed"] {
        ok(&querypack(&["run", "--db", "ex2.db", "--pack", "ex2.pack", "--strategy", s, "--out", s], dir.path()));
        csv.push(fs::read_to_string(dir.path().join(s).join("result.csv")).unwrap());
        counters.push(fs::read_to_string(dir.path().join(s).join("counters.json")).unwrap());
        let bits = fs::read(dir.path().join(s).join("result.bin")).unwrap();
        let rs = querypack::engine::ResultSet::from_bitmap(&bits).unwrap();
        assert!(rs.get(0, 0) && rs.get(1, 0));
    }
    assert_eq!(csv[0], "query_id,example_id\n0,0\n1,0\n");
    assert!(csv.iter().all(|c| *c == csv[0]));
    assert_ne!(counters[0], counters[2]);
}

#[test]
fn error_exit_codes() {
    let dir = setup();
    let missing = querypack(&["run", "--db", "missing.db", "--pack", "ex2.pack", "--out", "o"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.db"));

    fs::write(dir.path().join("broken.pack"), "p(X), (q(X) or").unwrap();
    let broken = querypack(&["run", "--db", "ex2.db", "--pack", "broken.pack", "--out", "o"], dir.path());
    assert_eq!(broken.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&broken.stderr).contains("broken.pack"));

    let strategy = querypack(&["run", "--db", "ex2.db", "--pack", "ex2.pack", "--strategy", "fast", "--out", "o"], dir.path());
    assert_eq!(strategy.status.code(), Some(2));

    fs::write(dir.path().join("unbound.pack"), "p(X), (q(X) or Y < 1)").unwrap();
    let unbound = querypack(&["run", "--db", "ex2.db", "--pack", "unbound.pack", "--out", "o"], dir.path());
    assert_eq!(unbound.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&unbound.stderr).contains("Y < 1"));

    assert_eq!(querypack(&[], dir.path()).status.code(), Some(2));
    assert_eq!(querypack(&["--help"], dir.path()).status.code(), Some(0));
}

const TOY: &str = "\
#example 0 key().
p(a). q(a,b). r(b).
#example 1 key().
p(a). q(a,a).
#example 2 key().
p(c). r(c).
#example 3 key().
q(a,b). r(a).
";

#[test]
fn mine_outputs() {
    let dir = setup();
    fs::write(dir.path().join("toy.db"), TOY).unwrap();
    fs::write(dir.path().join("bias.txt"), "template p/1 -\ntemplate q/2 +,-\ntemplate r/1 +\n").unwrap();
    ok(&querypack(&["mine", "--db", "toy.db", "--bias", "bias.txt", "--minfreq", "2", "--maxlevel", "2", "--out", "m"], dir.path()));
    let tsv = fs::read_to_string(dir.path().join("m/frequent.tsv")).unwrap();
    assert_eq!(tsv, "1\t3\tp(A)\n2\t2\tp(A), q(A,B)\n");
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("m/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["levels"][1]["candidates"], 2);

    ok(&querypack(&["mine", "--db", "toy.db", "--bias", "bias.txt", "--minfreq", "1", "--maxlevel", "0", "--out", "z"], dir.path()));
    assert_eq!(fs::read_to_string(dir.path().join("z/frequent.tsv")).unwrap(), "");

    ok(&querypack(&["mine", "--db", "toy.db", "--bias", "bias.txt", "--minfreq", "1", "--maxlevel", "1", "--out", "one"], dir.path()));
    assert_eq!(fs::read_to_string(dir.path().join("one/frequent.tsv")).unwrap(), "1\t3\tp(A)\n");

    let zero = querypack(&["mine", "--db", "toy.db", "--bias", "bias.txt", "--minfreq", "0", "--maxlevel", "1", "--out", "x"], dir.path());
    assert_eq!(zero.status.code(), Some(2));
    fs::write(dir.path().join("bad_bias.txt"), "template p/2 +\n").unwrap();
    let bad = querypack(&["mine", "--db", "toy.db", "--bias", "bad_bias.txt", "--minfreq", "1", "--maxlevel", "1", "--out", "x"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("bad_bias.txt"));
}

#[test]
fn bench_report_and_config_errors() {
    let dir = setup();
    fs::write(
        dir.path().join("bench.json"),
        r#"{"datasets": [{"generate": {"n": 30, "complexity": "medium"}}, {"path": "ex2.db"}],
            "stick": "circle(A", "seed": 5}"#,
    )
    .unwrap();
    let out = querypack(&["bench", "--config", "bench.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    fs::write(
        dir.path().join("bench.json"),
        r#"{"datasets": [{"generate": {"n": 30, "complexity": "medium"}}], "lookaheads": [0, 1], "seed": 5, "output": "report.json"}"#,
    )
    .unwrap();
    let out = querypack(&["bench", "--config", "bench.json"], dir.path());
    ok(&out);
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.lines().next().unwrap().contains("speedup"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["cells"].as_array().unwrap().len(), 2);
    assert_eq!(report["cells"][0]["model"]["pass"], true);

    fs::write(dir.path().join("bad.json"), r#"{"datasets": [], "seed": 1}"#).unwrap();
    assert_eq!(querypack(&["bench", "--config", "bad.json"], dir.path()).status.code(), Some(2));
    assert_eq!(querypack(&["bench", "--config", "absent.json"], dir.path()).status.code(), Some(2));
}
