use std::collections::{HashMap, HashSet};

use crate::datastore::{Atom, Conjunction, Term, Var};
use crate::packtree::{build_pack, PackNode, QueryPack};

use super::bias::{LanguageBias, Mode, Template};
use super::MinerError;

/// Key variables for a database of the given key arity: `K` alone, or
/// `K1..Kn`, with ids `0..n`.
pub fn key_vars(arity: usize) -> Vec<Var> {
    if arity == 1 {
        return vec![Var::new(0, "K")];
    }
    (0..arity).map(|i| Var::new(i as u32, &format!("K{}", i + 1))).collect()
}

fn fresh_name(used: &HashSet<String>, skip: usize) -> String {
    let mut k = 0;
    let mut found = 0;
    loop {
        let letter = (b'A' + (k % 26) as u8) as char;
        let name = if k < 26 { letter.to_string() } else { format!("{}{}", letter, k / 26) };
        k += 1;
        if used.contains(&name) {
            continue;
        }
        if found == skip {
            return name;
        }
        found += 1;
    }
}

struct Expander<'b> {
    bias: &'b LanguageBias,
    out: Vec<Conjunction>,
    seen: HashSet<Vec<Atom>>,
}

impl Expander<'_> {
    /// Literals one template allows after `avail`, in argument-choice order.
    fn literals(&self, t: &Template, avail: &[Var], next_id: u32) -> Vec<Atom> {
        let outputs = t.modes.iter().filter(|m| **m == Mode::Output).count();
        if self.bias.max_new_vars.is_some_and(|n| outputs > n) {
            return Vec::new();
        }
        let has_input = t.modes.contains(&Mode::Input);
        if !has_input && !avail.is_empty() {
            return Vec::new();
        }
        let used: HashSet<String> = avail.iter().map(|v| v.name.as_str().to_string()).collect();
        let mut fresh = (0..outputs).map(|i| Term::Var(Var::new(next_id + i as u32, &fresh_name(&used, i))));
        let choices: Vec<Vec<Term>> = t
            .modes
            .iter()
            .enumerate()
            .map(|(i, m)| match m {
                Mode::Input => avail.iter().map(|v| Term::Var(*v)).collect(),
                Mode::Output => vec![fresh.next().unwrap()],
                Mode::Constant => t.constants[i].clone(),
            })
            .collect();
        let mut out = Vec::new();
        let mut args = Vec::with_capacity(choices.len());
        fn product(choices: &[Vec<Term>], args: &mut Vec<Term>, t: &Template, out: &mut Vec<Atom>) {
            let Some((first, rest)) = choices.split_first() else {
                out.push(Atom::from_sym(t.pred, args.clone()));
                return;
            };
            for c in first {
                args.push(*c);
                product(rest, args, t, out);
                args.pop();
            }
        }
        product(&choices, &mut args, t, &mut out);
        out
    }

    fn extend(&mut self, atoms: &mut Vec<Atom>, avail: &mut Vec<Var>, next_id: u32, steps: usize) {
        for t in &self.bias.templates {
            for lit in self.literals(t, avail, next_id) {
                if atoms.contains(&lit) {
                    continue;
                }
                let old = avail.len();
                let mut next = next_id;
                for v in lit.vars() {
                    if !avail.contains(&v) {
                        avail.push(v);
                        next = next.max(v.id + 1);
                    }
                }
                atoms.push(lit);
                if self.seen.insert(atoms.clone()) {
                    self.out.push(Conjunction::new(atoms.clone()));
                    if steps > 1 {
                        self.extend(atoms, avail, next, steps - 1);
                    }
                }
                atoms.pop();
                avail.truncate(old);
            }
        }
    }
}

/// Every query formed by appending 1 to `steps` bias literals to `q`. Each
/// literal uses at least one variable already present (query or key) unless
/// there is none yet. Extensions come depth first: a refinement is followed
/// by its own longer extensions before the next one-literal refinement.
pub fn refine(q: &Conjunction, key: &[Var], bias: &LanguageBias, steps: usize) -> Vec<Conjunction> {
    let mut avail: Vec<Var> = key.to_vec();
    for v in q.vars() {
        if !avail.contains(&v) {
            avail.push(v);
        }
    }
    let next_id = avail.iter().map(|v| v.id + 1).max().unwrap_or(0);
    let mut x = Expander {
        bias,
        out: Vec::new(),
        seen: HashSet::new(),
    };
    if steps > 0 {
        x.extend(&mut q.atoms.clone(), &mut avail, next_id, steps);
    }
    x.out
}

/// Pack with `q` as its root conjunction and one leaf per refinement with
/// `lookahead + 1` steps.
pub fn build_broom(q: &Conjunction, key: &[Var], bias: &LanguageBias, lookahead: usize) -> Result<QueryPack, MinerError> {
    let refinements = refine(q, key, bias, lookahead + 1);
    if refinements.is_empty() {
        return Err(MinerError::EmptyRefinementSet);
    }
    let pack = build_pack(&refinements).map_err(|_| MinerError::EmptyRefinementSet)?;
    let mut root = pack.root;
    // The trie merges the stick with a prefix common to all refinements;
    // split that back off so the stick alone forms the root.
    if root.conj.len() > q.len() || root.is_leaf() {
        let rest = Conjunction::new(root.conj.atoms.split_off(q.len()));
        let child = PackNode {
            conj: rest,
            children: std::mem::take(&mut root.children),
            leaf: root.leaf.take(),
            labels: None,
        };
        root = PackNode::branch(root.conj, vec![child]);
    }
    Ok(QueryPack::new(root))
}

/// Renames non-key variables to `A, B, ...` in first-occurrence order, with
/// ids following the key ids. Two queries are treated as duplicates when
/// their canonical forms are equal.
pub fn canonical(q: &Conjunction, key: &[Var]) -> Conjunction {
    let used: HashSet<String> = key.iter().map(|v| v.name.as_str().to_string()).collect();
    let base = key.iter().map(|v| v.id + 1).max().unwrap_or(0);
    let mut map: HashMap<u32, Var> = key.iter().map(|v| (v.id, *v)).collect();
    let mut atoms = Vec::with_capacity(q.len());
    for a in &q.atoms {
        let args = a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => {
                    let n = map.len() - key.len();
                    Term::Var(*map.entry(v.id).or_insert_with(|| Var::new(base + n as u32, &fresh_name(&used, n))))
                }
                other => *other,
            })
            .collect();
        atoms.push(Atom::from_sym(a.pred, args));
    }
    Conjunction::new(atoms)
}
