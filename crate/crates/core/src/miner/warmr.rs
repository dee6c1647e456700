use std::collections::HashSet;
use std::fmt::Write;

use serde::Serialize;

use crate::datastore::{Conjunction, Database, Var};
use crate::engine::{evaluate_pack_on_examples, Strategy};
use crate::packtree::build_pack;

use super::bias::LanguageBias;
use super::refine::{canonical, refine};
use super::MinerError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrequentQuery {
    /// Canonically renamed.
    #[serde(serialize_with = "as_text")]
    pub conj: Conjunction,
    pub level: usize,
    pub frequency: usize,
}

fn as_text<S: serde::Serializer>(c: &Conjunction, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

/// Candidate bookkeeping for one level.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub level: usize,
    /// Candidates evaluated in this level's pack.
    pub candidates: usize,
    pub frequent: usize,
    /// Refinements dropped as renamings of an earlier candidate.
    pub duplicates: usize,
    /// Refinements dropped because a one-literal generalization was infrequent.
    pub pruned: usize,
    /// Counted work of the packed evaluation.
    pub work: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MiningRun {
    pub minfreq: usize,
    pub maxlevel: usize,
    pub examples: usize,
    pub levels: Vec<LevelStats>,
    pub frequent: Vec<FrequentQuery>,
}

impl MiningRun {
    /// One `level<TAB>frequency<TAB>query` line per frequent query.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for f in &self.frequent {
            writeln!(s, "{}\t{}\t{}", f.level, f.frequency, f.conj).unwrap();
        }
        s
    }

    /// Per-level candidate and frequent counts.
    pub fn summary_json(&self) -> String {
        let v = serde_json::json!({
            "minfreq": self.minfreq,
            "maxlevel": self.maxlevel,
            "examples": self.examples,
            "levels": self.levels,
            "total_candidates": self.levels.iter().map(|l| l.candidates).sum::<usize>(),
            "total_frequent": self.frequent.len(),
        });
        serde_json::to_string_pretty(&v).unwrap() + "\n"
    }
}

/// Level-wise frequent-query discovery. Level `l` refines each frequent
/// query of level `l - 1` by one literal, drops renamings of earlier
/// candidates and specializations of known infrequent queries, then counts
/// all remaining candidates with one packed evaluation. The empty query is
/// the implicit level 0 and is not reported.
pub fn warmr_levelwise(
    bias: &LanguageBias,
    db: &Database,
    key: &[Var],
    minfreq: usize,
    maxlevel: usize,
) -> Result<MiningRun, MinerError> {
    if minfreq == 0 {
        return Err(MinerError::InvalidParameter("minfreq must be at least 1".into()));
    }
    let mut run = MiningRun {
        minfreq,
        maxlevel,
        examples: db.examples.len(),
        levels: Vec::new(),
        frequent: Vec::new(),
    };
    let mut frontier = vec![Conjunction::empty()];
    let mut infrequent: HashSet<Conjunction> = HashSet::new();
    for level in 1..=maxlevel {
        let mut stats = LevelStats {
            level,
            ..LevelStats::default()
        };
        let mut seen = HashSet::new();
        let mut candidates = Vec::new();
        for parent in &frontier {
            for r in refine(parent, key, bias, 1) {
                let c = canonical(&r, key);
                if seen.contains(&c) {
                    stats.duplicates += 1;
                    continue;
                }
                let has_infrequent_generalization = (0..c.len()).any(|i| {
                    let mut g = c.clone();
                    g.atoms.remove(i);
                    infrequent.contains(&canonical(&g, key))
                });
                seen.insert(c.clone());
                if has_infrequent_generalization {
                    stats.pruned += 1;
                    continue;
                }
                candidates.push(c);
            }
        }
        stats.candidates = candidates.len();
        if candidates.is_empty() {
            run.levels.push(stats);
            break;
        }
        let pack = build_pack(&candidates).expect("non-empty candidate list");
        let (rs, counters) = evaluate_pack_on_examples(&pack, db, key, Strategy::Packed)?;
        stats.work = counters.total_work();
        let mut next = Vec::new();
        for (i, c) in candidates.into_iter().enumerate() {
            let frequency = rs.count(i);
            if frequency >= minfreq {
                run.frequent.push(FrequentQuery {
                    conj: c.clone(),
                    level,
                    frequency,
                });
                next.push(c);
            } else {
                infrequent.insert(c);
            }
        }
        stats.frequent = next.len();
        run.levels.push(stats);
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(run)
}
