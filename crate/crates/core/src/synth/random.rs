use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::datastore::{Atom, Clause, Conjunction, Database, Example, Term, Var};
use crate::packtree::{PackNode, QueryPack};

/// A small database with a random pack over it.
#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub db: Database,
    pub pack: QueryPack,
    pub key: Vec<Var>,
}

/// Size limits for [`random_instance`].
#[derive(Clone, Copy, Debug)]
pub struct RandomLimits {
    pub max_preds: usize,
    pub max_facts: usize,
    pub max_examples: usize,
    pub max_queries: usize,
    pub max_depth: usize,
}

impl Default for RandomLimits {
    fn default() -> Self {
        RandomLimits {
            max_preds: 6,
            max_facts: 30,
            max_examples: 10,
            max_queries: 16,
            max_depth: 3,
        }
    }
}

struct Gen {
    rng: ChaCha8Rng,
    preds: Vec<(String, usize)>,
    domain: Vec<Term>,
    next_var: u32,
    with_rule: bool,
}

impl Gen {
    fn constant(&mut self) -> Term {
        *self.domain.choose(&mut self.rng).unwrap()
    }

    fn fresh(&mut self) -> Var {
        let v = Var::new(self.next_var, &format!("V{}", self.next_var));
        self.next_var += 1;
        v
    }

    /// One literal; `bound` holds the variables earlier literals bind.
    fn literal(&mut self, bound: &mut Vec<Var>) -> Atom {
        if !bound.is_empty() && self.rng.gen_bool(0.15) {
            let a = Term::Var(*bound.choose(&mut self.rng).unwrap());
            let b = if self.rng.gen_bool(0.5) {
                Term::Var(*bound.choose(&mut self.rng).unwrap())
            } else {
                self.constant()
            };
            let op = ["<", "=<", "\\=", "="][self.rng.gen_range(0..4)];
            return Atom::new(op, vec![a, b]);
        }
        if self.with_rule && self.rng.gen_bool(0.15) {
            let arg = self.arg(bound);
            return Atom::new("d", vec![arg]);
        }
        let (name, arity) = self.preds.choose(&mut self.rng).unwrap().clone();
        let args = (0..arity).map(|_| self.arg(bound)).collect();
        let atom = Atom::new(&name, args);
        for v in atom.vars() {
            if !bound.contains(&v) {
                bound.push(v);
            }
        }
        atom
    }

    fn arg(&mut self, bound: &[Var]) -> Term {
        match self.rng.gen_range(0..10) {
            0..=4 if !bound.is_empty() => Term::Var(*bound.choose(&mut self.rng).unwrap()),
            0..=1 => self.constant(),
            _ => {
                let v = self.fresh();
                Term::Var(v)
            }
        }
    }

    fn conj(&mut self, len: usize, bound: &mut Vec<Var>) -> Conjunction {
        let mut atoms = Vec::new();
        for _ in 0..len {
            let a = self.literal(bound);
            if a.pred.as_str() == "d" {
                for v in a.vars() {
                    if !bound.contains(&v) {
                        bound.push(v);
                    }
                }
            }
            atoms.push(a);
        }
        Conjunction::new(atoms)
    }

    fn node(&mut self, depth: usize, max_depth: usize, budget: &mut usize, bound: &[Var], next_leaf: &mut usize) -> PackNode {
        let mut bound = bound.to_vec();
        let len = self.rng.gen_range(0..3);
        let conj = self.conj(len, &mut bound);
        let branch = depth < max_depth && *budget >= 2 && self.rng.gen_bool(if depth == 0 { 0.9 } else { 0.5 });
        if !branch {
            let id = *next_leaf;
            *next_leaf += 1;
            *budget -= 1;
            return PackNode::leaf(conj, id);
        }
        let k = self.rng.gen_range(2..=4).min(*budget);
        // Reserve one leaf per child before any child spends more.
        *budget -= k;
        let mut children = Vec::new();
        for _ in 0..k {
            *budget += 1;
            children.push(self.node(depth + 1, max_depth, budget, &bound, next_leaf));
        }
        PackNode::branch(conj, children)
    }
}

/// A reproducible random database and pack within `limits`.
pub fn random_instance(seed: u64, limits: RandomLimits) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let with_rule = limits.max_preds > 1 && rng.gen_bool(0.4);
    // The rule head counts as one of the predicates.
    let npreds = rng.gen_range(1..=limits.max_preds - usize::from(with_rule));
    let preds: Vec<(String, usize)> = (0..npreds).map(|i| (format!("p{}", i), rng.gen_range(1..=2))).collect();
    let mut domain: Vec<Term> = (0..3).map(Term::Int).collect();
    domain.extend(["a", "b", "c"].map(Term::constant));
    let keyed = rng.gen_bool(0.3);
    let mut g = Gen {
        rng,
        preds,
        domain,
        next_var: if keyed { 1 } else { 0 },
        with_rule,
    };

    let mut b = Database::builder(usize::from(keyed));
    for _ in 0..g.rng.gen_range(0..6) {
        let f = ground_fact(&mut g);
        b.fact(f).unwrap();
    }
    if with_rule {
        // d(X) :- pi(X, ...), pj(...).
        let (p, pa) = g.preds[0].clone();
        let (q, qa) = g.preds.last().unwrap().clone();
        let x = Term::Var(Var::new(0, "X"));
        let y = Term::Var(Var::new(1, "Y"));
        let first = Atom::new(&p, if pa == 2 { vec![x, y] } else { vec![x] });
        let second = Atom::new(&q, if qa == 2 { vec![y, x] } else { vec![x] });
        b.rule(Clause {
            head: Atom::new("d", vec![x]),
            body: Conjunction::new(vec![first, second]),
            var_count: 2,
        })
        .unwrap();
    }
    let nex = g.rng.gen_range(1..=limits.max_examples);
    for i in 0..nex {
        let key = if keyed { vec![Term::Int(100 + i as i64)] } else { Vec::new() };
        let mut e = Example::new(i as u64, key.clone());
        let nf = g.rng.gen_range(0..=limits.max_facts);
        for _ in 0..nf {
            let mut f = ground_fact(&mut g);
            if keyed && g.rng.gen_bool(0.5) {
                f.args[0] = key[0];
            }
            e.add_fact(f);
        }
        b.example(e).unwrap();
    }
    let db = b.build().unwrap();

    let key_var = Var::new(0, "K");
    let bound = if keyed { vec![key_var] } else { Vec::new() };
    let mut budget = limits.max_queries;
    let mut next_leaf = 0;
    let max_depth = g.rng.gen_range(0..=limits.max_depth);
    let root = g.node(0, max_depth, &mut budget, &bound, &mut next_leaf);
    RandomInstance {
        db,
        pack: QueryPack::new(root),
        key: if keyed { vec![key_var] } else { Vec::new() },
    }
}

fn ground_fact(g: &mut Gen) -> Atom {
    let (name, arity) = g.preds.choose(&mut g.rng).unwrap().clone();
    let args = (0..arity).map(|_| g.constant()).collect();
    Atom::new(&name, args)
}
