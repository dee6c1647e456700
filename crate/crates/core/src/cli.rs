//! The `querypack` command line. Exit codes: 0 on success, 2 for unreadable
//! or malformed input and bad options, 3 when evaluation fails.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{run_bench, BenchConfig, BenchError};
use crate::bongard::{generate, Complexity};
use crate::datastore::{load_program, Database};
use crate::engine::{evaluate_pack_parallel, work_report, Strategy};
use crate::miner::{key_vars, parse_bias, warmr_levelwise, MinerError};
use crate::packtree::parse_pack_file;

#[derive(Parser, Debug)]
#[command(name = "querypack", version, about = "Query-pack evaluation, mining and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic Bongard-style example file.
    GenerateBongard {
        #[arg(long)]
        n: usize,
        /// simple, medium or none
        #[arg(long, default_value = "simple")]
        complexity: Complexity,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a pack on every example; writes result.csv, result.bin and
    /// counters.json into the output directory.
    Run {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        pack: PathBuf,
        #[arg(long, default_value = "packed")]
        strategy: Strategy,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Level-wise frequent-query mining; writes frequent.tsv and
    /// summary.json into the output directory.
    Mine {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        bias: PathBuf,
        #[arg(long)]
        minfreq: usize,
        #[arg(long)]
        maxlevel: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the benchmark described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn input(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {}", path.display(), e),
    }
}

fn eval(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 3,
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(path, e))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| input(path, e))
}

fn out_dir(path: &Path) -> Result<(), Failure> {
    fs::create_dir_all(path).map_err(|e| input(path, e))
}

fn load_db(path: &Path) -> Result<Database, Failure> {
    load_program(&read(path)?).map_err(|e| input(path, e))
}

pub fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::GenerateBongard { n, complexity, seed, out } => {
            if n == 0 {
                return Err(Failure {
                    code: 2,
                    message: "--n must be at least 1".into(),
                });
            }
            let set = generate(n, complexity, seed);
            write(&out, set.to_text())?;
            println!("wrote {} examples to {} (rule: {})", n, out.display(), set.rule);
        }
        Command::Run {
            db,
            pack,
            strategy,
            out,
            workers,
        } => {
            let database = load_db(&db)?;
            let file = parse_pack_file(&read(&pack)?).map_err(|e| input(&pack, e))?;
            let (rs, counters) = evaluate_pack_parallel(&file.pack, &database, &file.key, strategy, workers).map_err(eval)?;
            out_dir(&out)?;
            write(&out.join("result.csv"), rs.to_csv())?;
            write(&out.join("result.bin"), rs.to_bitmap())?;
            write(&out.join("counters.json"), counters.to_json())?;
            let r = work_report(&counters);
            println!(
                "{} queries x {} examples, strategy {}: {} work units",
                rs.query_count(),
                rs.example_count(),
                strategy,
                r.total_work
            );
        }
        Command::Mine {
            db,
            bias,
            minfreq,
            maxlevel,
            out,
        } => {
            let database = load_db(&db)?;
            let b = parse_bias(&read(&bias)?).map_err(|e| input(&bias, e))?;
            let key = key_vars(database.key_arity());
            let run = warmr_levelwise(&b, &database, &key, minfreq, maxlevel).map_err(|e| match e {
                MinerError::Eval(e) => eval(e),
                other => Failure {
                    code: 2,
                    message: other.to_string(),
                },
            })?;
            out_dir(&out)?;
            write(&out.join("frequent.tsv"), run.to_tsv())?;
            write(&out.join("summary.json"), run.summary_json())?;
            println!("{} frequent queries over {} levels", run.frequent.len(), run.levels.len());
        }
        Command::Bench { config } => {
            let cfg = BenchConfig::from_json(&read(&config)?).map_err(|e| input(&config, e))?;
            let base = config.parent().unwrap_or(Path::new("."));
            let (report, timings) = run_bench(&cfg, base).map_err(|e| match e {
                BenchError::Eval { .. } => eval(e),
                other => Failure {
                    code: 2,
                    message: other.to_string(),
                },
            })?;
            print!("{}", report.table(Some(&timings)));
            if let Some(o) = &cfg.output {
                let path = if o.is_absolute() { o.clone() } else { base.join(o) };
                write(&path, report.to_json())?;
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
