//! Synthetic Bongard-style classification data: each example is a small
//! scene of shapes with spatial relations, labelled by a hidden rule.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datastore::{Atom, Conjunction, Database, Example, Substitution, Term, Var};
use crate::engine::SolutionCursor;

pub const SHAPES: [&str; 3] = ["circle", "triangle", "square"];
pub const RELATIONS: [&str; 3] = ["leftof", "above", "in"];

/// How labels are assigned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Complexity {
    /// Positive iff a planted 2-literal rule holds.
    Simple,
    /// Positive iff a planted 4-literal rule holds.
    Medium,
    /// Fair coin flips.
    None,
}

impl Complexity {
    fn rule_length(self) -> usize {
        match self {
            Complexity::Simple | Complexity::None => 2,
            Complexity::Medium => 4,
        }
    }
}

impl FromStr for Complexity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "simple" => Ok(Complexity::Simple),
            "medium" => Ok(Complexity::Medium),
            "none" => Ok(Complexity::None),
            _ => Err(format!("unknown complexity `{}` (simple, medium or none)", s)),
        }
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::Simple => "simple",
            Complexity::Medium => "medium",
            Complexity::None => "none",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BongardSet {
    pub db: Database,
    /// The labelling rule; for [`Complexity::None`] a rule drawn the same way
    /// that the labels ignore.
    pub rule: Conjunction,
    pub complexity: Complexity,
    pub seed: u64,
}

impl BongardSet {
    /// Example file text, with the rule in a comment line.
    pub fn to_text(&self) -> String {
        let kind = if self.complexity == Complexity::None {
            "unused rule"
        } else {
            "planted rule"
        };
        format!(
            "% bongard n={} complexity={} seed={}\n% {}: {}\n{}",
            self.db.examples.len(),
            self.complexity,
            self.seed,
            kind,
            self.rule,
            self.db.serialize()
        )
    }
}

fn scene(rng: &mut ChaCha8Rng, id: u64) -> Example {
    let k = rng.gen_range(2..=8);
    let mut ex = Example::new(id, Vec::new());
    let objs: Vec<Term> = (1..=k).map(|i| Term::constant(&format!("o{}", i))).collect();
    let mut pos = Vec::with_capacity(k);
    for o in &objs {
        let shape = SHAPES[rng.gen_range(0..SHAPES.len())];
        ex.add_fact(Atom::new(shape, vec![*o]));
        pos.push((rng.gen_range(0..100u32), rng.gen_range(0..100u32)));
    }
    for (i, a) in objs.iter().enumerate() {
        for (j, b) in objs.iter().enumerate() {
            if i == j {
                continue;
            }
            if pos[i].0 < pos[j].0 {
                ex.add_fact(Atom::new("leftof", vec![*a, *b]));
            }
            if pos[i].1 > pos[j].1 {
                ex.add_fact(Atom::new("above", vec![*a, *b]));
            }
            if rng.gen_bool(0.15) {
                ex.add_fact(Atom::new("in", vec![*a, *b]));
            }
        }
    }
    ex
}

/// A connected conjunction of `len` literals: a shape literal first, then
/// shape tests on existing variables or relations to a new variable.
fn draw_rule(rng: &mut ChaCha8Rng, len: usize) -> Conjunction {
    let var = |i: usize| Var::new(i as u32, &((b'A' + i as u8) as char).to_string());
    let mut vars = vec![var(0)];
    let mut atoms = vec![Atom::new(SHAPES.choose(rng).unwrap(), vec![Term::Var(vars[0])])];
    while atoms.len() < len {
        let x = Term::Var(*vars.choose(rng).unwrap());
        let lit = if rng.gen_bool(0.35) {
            Atom::new(SHAPES.choose(rng).unwrap(), vec![x])
        } else {
            let y = var(vars.len());
            let rel = RELATIONS.choose(rng).unwrap();
            let args = if rng.gen_bool(0.5) { vec![x, Term::Var(y)] } else { vec![Term::Var(y), x] };
            vars.push(y);
            Atom::new(rel, args)
        };
        if !atoms.contains(&lit) {
            atoms.push(lit);
        }
    }
    Conjunction::new(atoms)
}

fn holds(db: &Database, ex: &Example, rule: &Conjunction) -> bool {
    SolutionCursor::new(db, Some(ex), rule, &Substitution::new())
        .next_solution()
        .expect("rule bodies use no comparisons")
        .is_some()
}

/// Generates `n` scenes and a rule. Planted rules are redrawn until they
/// cover between a quarter and three quarters of the scenes (or the best
/// of 200 draws on tiny sets). Fully determined by `seed`.
pub fn generate(n: usize, complexity: Complexity, seed: u64) -> BongardSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenes: Vec<Example> = (0..n as u64).map(|i| scene(&mut rng, i)).collect();
    let empty = Database::builder(0).build().unwrap();
    let mut best: Option<(f64, Conjunction, Vec<bool>)> = None;
    for _ in 0..200 {
        let rule = draw_rule(&mut rng, complexity.rule_length());
        let covered: Vec<bool> = scenes.iter().map(|ex| holds(&empty, ex, &rule)).collect();
        let frac = covered.iter().filter(|&&c| c).count() as f64 / n.max(1) as f64;
        let dist = (frac - 0.5).abs();
        if best.as_ref().is_none_or(|b| dist < b.0) {
            best = Some((dist, rule, covered));
        }
        if dist <= 0.25 {
            break;
        }
    }
    let (_, rule, covered) = best.unwrap();
    let mut b = Database::builder(0);
    for (mut ex, c) in scenes.into_iter().zip(covered) {
        let pos = match complexity {
            Complexity::None => rng.gen_bool(0.5),
            _ => c,
        };
        ex.label = Some(if pos { "pos" } else { "neg" }.to_string());
        b.example(ex).unwrap();
    }
    BongardSet {
        db: b.build().unwrap(),
        rule,
        complexity,
        seed,
    }
}

/// Mode declarations over the scene vocabulary. `small` allows shape tests
/// and outgoing relations; `large` also allows incoming relations and
/// relations between two existing objects.
pub fn bias_text(size: &str) -> Option<String> {
    let mut s = String::new();
    for shape in SHAPES {
        s += &format!("template {}/1 -\n", shape);
    }
    for shape in SHAPES {
        s += &format!("template {}/1 +\n", shape);
    }
    let rel_modes: &[&str] = match size {
        "small" => &["+,-"],
        "medium" => &["+,-", "-,+"],
        "large" => &["+,-", "-,+", "+,+"],
        _ => return None,
    };
    for rel in RELATIONS {
        for m in rel_modes {
            s += &format!("template {}/2 {}\n", rel, m);
        }
    }
    s += "maxnewvars 1\n";
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datastore::load_program;
    use crate::engine::{evaluate_pack_on_examples, Strategy};
    use crate::miner::{clause_accuracy, labelled, parse_bias};
    use crate::packtree::build_pack;

    #[test]
    fn deterministic_and_parses_back() {
        let a = generate(10, Complexity::Simple, 7).to_text();
        let b = generate(10, Complexity::Simple, 7).to_text();
        assert_eq!(a, b);
        assert_ne!(a, generate(10, Complexity::Simple, 8).to_text());
        let db = load_program(&a).unwrap();
        assert_eq!(db.examples.len(), 10);
        assert!(db.examples.examples.iter().all(|e| e.label.is_some()));
        assert_eq!(db.serialize(), generate(10, Complexity::Simple, 7).db.serialize());
    }

    #[test]
    fn scenes_have_two_to_eight_objects() {
        let set = generate(200, Complexity::Medium, 1);
        for e in &set.db.examples.examples {
            let objs: usize = SHAPES.iter().map(|s| e.facts(&crate::datastore::PredKey::new(s, 1)).map_or(0, |t| t.len())).sum();
            assert!((2..=8).contains(&objs));
        }
        assert_eq!(set.rule.len(), 4);
    }

    fn rule_accuracy(set: &BongardSet) -> (f64, usize) {
        let pack = build_pack(std::slice::from_ref(&set.rule)).unwrap();
        let (rs, _) = evaluate_pack_on_examples(&pack, &set.db, &[], Strategy::Separate).unwrap();
        (clause_accuracy(0, &rs, &labelled(&set.db, "pos")).unwrap(), rs.count(0))
    }

    #[test]
    fn planted_rules_classify_perfectly() {
        for (c, seed) in [(Complexity::Simple, 3), (Complexity::Medium, 4), (Complexity::Simple, 99)] {
            let set = generate(300, c, seed);
            let (acc, covered) = rule_accuracy(&set);
            assert_eq!(acc, 1.0);
            let pos = labelled(&set.db, "pos").len();
            assert_eq!(covered, pos);
            assert!((75..=225).contains(&pos), "coverage {}", pos);
        }
    }

    #[test]
    fn random_labels_ignore_the_rule() {
        let set = generate(400, Complexity::None, 5);
        let (acc, covered) = rule_accuracy(&set);
        let prior = labelled(&set.db, "pos").len() as f64 / 400.0;
        // 99% binomial interval around the prior for `covered` draws.
        let half = 2.576 * (prior * (1.0 - prior) / covered as f64).sqrt();
        assert!((acc - prior).abs() <= half, "accuracy {} prior {} ±{}", acc, prior, half);
    }

    #[test]
    fn biases_parse() {
        for size in ["small", "medium", "large"] {
            let b = parse_bias(&bias_text(size).unwrap()).unwrap();
            assert!(b.templates.len() >= 9);
        }
        assert!(bias_text("huge").is_none());
    }
}
