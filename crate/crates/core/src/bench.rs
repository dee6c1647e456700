//! Counted-work comparison of evaluation strategies on broom packs or on a
//! fixed pack, with cost-model bound checks per cell.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bongard::{bias_text, generate, Complexity};
use crate::costmodel::{fit_from_counters, multi_level, one_level, one_level_from_counters, validate_bounds};
use crate::datastore::{load_program, parse_conjunction, Conjunction, Database, Var, VarScope};
use crate::engine::{evaluate_pack_parallel, EvalError, ResultSet, Strategy, WorkCounters};
use crate::miner::{build_broom, key_vars, parse_bias, LanguageBias};
use crate::packtree::{parse_pack_file, QueryPack};

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub n: usize,
    pub complexity: Complexity,
    /// Defaults to the config seed.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub path: Option<PathBuf>,
    pub generate: Option<GenerateSpec>,
}

/// Benchmark description, read from JSON. Relative paths are resolved
/// against the directory holding the config file.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub datasets: Vec<DatasetSpec>,
    /// A fixed pack file; when set, no brooms are built.
    pub pack: Option<PathBuf>,
    /// `small`, `medium`, `large` or a bias file path.
    #[serde(default = "default_bias")]
    pub bias: String,
    /// Root query of each broom. Defaults to the first `stick_literals`
    /// literals of a generated set's rule, or the empty query.
    pub stick: Option<String>,
    #[serde(default = "one")]
    pub stick_literals: usize,
    #[serde(default = "default_lookaheads")]
    pub lookaheads: Vec<usize>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub workers: usize,
    pub output: Option<PathBuf>,
}

fn default_bias() -> String {
    "small".into()
}

fn one() -> usize {
    1
}

fn default_lookaheads() -> Vec<usize> {
    vec![0, 1, 2]
}

fn default_strategies() -> Vec<Strategy> {
    vec![Strategy::Disjoint, Strategy::Packed]
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("cell {cell}: {source}")]
    Eval {
        cell: String,
        #[source]
        source: EvalError,
    },
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<BenchConfig, BenchError> {
        let cfg: BenchConfig = serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), BenchError> {
        if self.repetitions == 0 {
            return Err(BenchError::Config("repetitions must be at least 1".into()));
        }
        if self.datasets.is_empty() {
            return Err(BenchError::Config("no datasets".into()));
        }
        if self.strategies.is_empty() {
            return Err(BenchError::Config("no strategies".into()));
        }
        for d in &self.datasets {
            if d.path.is_some() == d.generate.is_some() {
                return Err(BenchError::Config("each dataset needs exactly one of `path` and `generate`".into()));
            }
        }
        Ok(())
    }
}

/// Bound check of the measured disjoint/packed ratio against the model.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ModelCheck {
    pub predicted: f64,
    pub upper: Option<f64>,
    pub pass: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BenchCell {
    pub dataset: String,
    pub lookahead: Option<usize>,
    pub stick: String,
    pub queries: usize,
    pub depth: usize,
    pub bf: usize,
    /// Counted work per strategy.
    pub work: BTreeMap<Strategy, u64>,
    /// Disjoint work over packed work.
    pub speedup: Option<f64>,
    pub model: Option<ModelCheck>,
    /// Every strategy produced the same result set.
    pub results_agree: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BenchReport {
    pub seed: u64,
    pub cells: Vec<BenchCell>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap() + "\n"
    }

    /// Fixed-width table of the cells; `timings` (one per cell) adds a
    /// wall-clock column.
    pub fn table(&self, timings: Option<&[Duration]>) -> String {
        let mut s = String::new();
        writeln!(s, "{:<28} {:>3} {:>7} {:>4} {:>14} {:>14} {:>8} {:>6}", "dataset", "la", "queries", "bf", "disjoint", "packed", "speedup", "model").unwrap();
        for (i, c) in self.cells.iter().enumerate() {
            let la = c.lookahead.map_or("-".to_string(), |l| l.to_string());
            let w = |s: Strategy| c.work.get(&s).map_or("-".to_string(), |w| w.to_string());
            let sp = c.speedup.map_or("-".to_string(), |x| format!("{:.2}", x));
            let m = c.model.as_ref().map_or("-", |m| if m.pass { "ok" } else { "FAIL" });
            write!(s, "{:<28} {:>3} {:>7} {:>4} {:>14} {:>14} {:>8} {:>6}", c.dataset, la, c.queries, c.bf, w(Strategy::Disjoint), w(Strategy::Packed), sp, m).unwrap();
            if let Some(t) = timings.and_then(|t| t.get(i)) {
                write!(s, " {:>9.3}s", t.as_secs_f64()).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

struct Dataset {
    label: String,
    db: Database,
    rule: Option<Conjunction>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read(path: &Path) -> Result<String, BenchError> {
    std::fs::read_to_string(path).map_err(|e| BenchError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_dataset(spec: &DatasetSpec, cfg: &BenchConfig, base: &Path) -> Result<Dataset, BenchError> {
    if let Some(g) = &spec.generate {
        let seed = g.seed.unwrap_or(cfg.seed);
        let set = generate(g.n, g.complexity, seed);
        return Ok(Dataset {
            label: format!("bongard-{}-{}-s{}", g.n, g.complexity, seed),
            db: set.db,
            rule: Some(set.rule),
        });
    }
    let path = resolve(base, spec.path.as_ref().unwrap());
    let db = load_program(&read(&path)?).map_err(|e| BenchError::Input {
        path: path.clone(),
        message: e.to_string(),
    })?;
    Ok(Dataset {
        label: path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned()),
        db,
        rule: None,
    })
}

fn load_bias(cfg: &BenchConfig, base: &Path) -> Result<LanguageBias, BenchError> {
    let (text, path) = match bias_text(&cfg.bias) {
        Some(t) => (t, PathBuf::from(&cfg.bias)),
        None => {
            let p = resolve(base, Path::new(&cfg.bias));
            (read(&p)?, p)
        }
    };
    parse_bias(&text).map_err(|e| BenchError::Input {
        path,
        message: e.to_string(),
    })
}

/// Runs every strategy `repetitions` times on one pack and summarizes.
fn measure(cfg: &BenchConfig, cell: String, lookahead: Option<usize>, stick: String, pack: &QueryPack, db: &Database, key: &[Var]) -> Result<(BenchCell, Duration), BenchError> {
    let mut runs: Vec<(Strategy, ResultSet, WorkCounters)> = Vec::new();
    let mut best = Duration::MAX;
    for _ in 0..cfg.repetitions {
        let t = Instant::now();
        runs.clear();
        for &s in &cfg.strategies {
            let (rs, c) = evaluate_pack_parallel(pack, db, key, s, cfg.workers).map_err(|source| BenchError::Eval {
                cell: cell.clone(),
                source,
            })?;
            runs.push((s, rs, c));
        }
        best = best.min(t.elapsed());
    }
    let find = |s: Strategy| runs.iter().find(|r| r.0 == s);
    let speedup = match (find(Strategy::Disjoint), find(Strategy::Packed)) {
        (Some(d), Some(p)) if p.2.total_work() > 0 => Some(d.2.total_work() as f64 / p.2.total_work() as f64),
        (Some(_), Some(_)) => Some(1.0),
        _ => None,
    };
    let model = match (find(Strategy::Disjoint), find(Strategy::Packed)) {
        (Some(d), Some(p)) => {
            let predicted = if pack.depth <= 1 {
                one_level_from_counters(&d.2).and_then(|p| one_level(&p))
            } else {
                fit_from_counters(&d.2, pack).and_then(|p| multi_level(&p))
            };
            predicted.ok().map(|r| {
                let v = validate_bounds(d.2.total_work() as f64, p.2.total_work() as f64, &r);
                ModelCheck {
                    predicted: r.speedup,
                    upper: r.upper,
                    pass: v.pass,
                    diagnostics: v.diagnostics,
                }
            })
        }
        _ => None,
    };
    let results_agree = runs.windows(2).all(|w| w[0].1 == w[1].1);
    let cell = BenchCell {
        dataset: cell,
        lookahead,
        stick,
        queries: pack.query_count,
        depth: pack.depth,
        bf: pack.max_branching,
        work: runs.iter().map(|r| (r.0, r.2.total_work())).collect(),
        speedup,
        model,
        results_agree,
    };
    Ok((cell, best))
}

/// Runs all cells. `base` anchors relative paths. Returns the report and
/// the best wall-clock time of each cell.
pub fn run_bench(cfg: &BenchConfig, base: &Path) -> Result<(BenchReport, Vec<Duration>), BenchError> {
    cfg.check()?;
    let mut report = BenchReport {
        seed: cfg.seed,
        cells: Vec::new(),
    };
    let mut timings = Vec::new();
    let fixed = match &cfg.pack {
        Some(p) => {
            let path = resolve(base, p);
            let file = parse_pack_file(&read(&path)?).map_err(|e| BenchError::Input {
                path: path.clone(),
                message: e.to_string(),
            })?;
            Some(file)
        }
        None => None,
    };
    let bias = if fixed.is_none() { Some(load_bias(cfg, base)?) } else { None };
    for spec in &cfg.datasets {
        let ds = load_dataset(spec, cfg, base)?;
        if let Some(file) = &fixed {
            let (cell, t) = measure(cfg, ds.label.clone(), None, file.pack.root.conj.to_string(), &file.pack, &ds.db, &file.key)?;
            report.cells.push(cell);
            timings.push(t);
            continue;
        }
        let key = key_vars(ds.db.key_arity());
        let stick = match (&cfg.stick, &ds.rule) {
            (Some(text), _) => {
                let mut scope = VarScope::new();
                for k in &key {
                    scope.get(k.name.as_str());
                }
                Conjunction::new(parse_conjunction(text, &mut scope).map_err(|e| BenchError::Config(format!("stick `{}`: {}", text, e)))?)
            }
            (None, Some(rule)) => Conjunction::new(rule.atoms[..cfg.stick_literals.min(rule.len())].to_vec()),
            (None, None) => Conjunction::empty(),
        };
        for &la in &cfg.lookaheads {
            let label = format!("{} la={}", ds.label, la);
            let pack = build_broom(&stick, &key, bias.as_ref().unwrap(), la).map_err(|e| BenchError::Config(format!("{}: {}", label, e)))?;
            let (cell, t) = measure(cfg, ds.label.clone(), Some(la), stick.to_string(), &pack, &ds.db, &key)?;
            report.cells.push(cell);
            timings.push(t);
        }
    }
    Ok((report, timings))
}
