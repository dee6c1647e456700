use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::datastore::{Atom, Conjunction, Database, DatabaseBuilder, Example, Term, Var};
use crate::packtree::{PackNode, QueryPack};

/// A database together with a pack whose per-node work is known.
#[derive(Clone, Debug)]
pub struct Workload {
    pub db: Database,
    pub pack: QueryPack,
}

struct Vars(u32);

impl Vars {
    fn fresh(&mut self, prefix: &str) -> Term {
        self.0 += 1;
        Term::Var(Var::new(self.0 - 1, &format!("{}{}", prefix, self.0 - 1)))
    }
}

fn atom(p: &str, args: Vec<Term>) -> Atom {
    Atom::new(p, args)
}

/// Facts `a(1..=m)` and the single fact `z(m)`. The conjunction `a(V), z(V)`
/// then has exactly one solution, found after `2m + 2` work units.
fn padding(b: &mut DatabaseBuilder, a: &str, z: &str, m: usize) {
    for i in 1..=m {
        b.fact(atom(a, vec![Term::Int(i as i64)])).unwrap();
    }
    b.fact(atom(z, vec![Term::Int(m as i64)])).unwrap();
}

fn pad_literals(a: &str, z: &str, m: usize, vars: &mut Vars) -> Vec<Atom> {
    if m == 0 {
        return Vec::new();
    }
    let v = vars.fresh("V");
    vec![atom(a, vec![v]), atom(z, vec![v])]
}

fn with_examples(mut b: DatabaseBuilder, examples: usize) -> Database {
    for i in 0..examples {
        b.example(Example::new(i as u64, Vec::new())).unwrap();
    }
    b.build().unwrap()
}

/// Complete `b`-ary pack of depth `d`. Every node at level `l` runs
/// `a_l(V), z_l(V)` over `facts[l]` facts: one solution for `2 facts[l] + 2`
/// work units (no literals and no work when `facts[l]` is 0).
pub fn uniform_pack(b: usize, d: usize, facts: &[usize], examples: usize) -> Workload {
    assert_eq!(facts.len(), d + 1, "one fact count per level");
    let mut db = Database::builder(0);
    for (l, &m) in facts.iter().enumerate() {
        if m > 0 {
            padding(&mut db, &format!("a{}", l), &format!("z{}", l), m);
        }
    }
    let mut vars = Vars(0);
    let mut next_leaf = 0;
    fn build(l: usize, b: usize, d: usize, facts: &[usize], vars: &mut Vars, next_leaf: &mut usize) -> PackNode {
        let conj = Conjunction::new(pad_literals(&format!("a{}", l), &format!("z{}", l), facts[l], vars));
        if l == d {
            *next_leaf += 1;
            return PackNode::leaf(conj, *next_leaf - 1);
        }
        let children = (0..b).map(|_| build(l + 1, b, d, facts, vars, next_leaf)).collect();
        PackNode::branch(conj, children)
    }
    let root = build(0, b, d, facts, &mut vars, &mut next_leaf);
    Workload {
        db: with_examples(db, examples),
        pack: QueryPack::new(root),
    }
}

/// Work per node of [`uniform_pack`] at a level with `m` padding facts.
pub fn padding_work(m: usize) -> f64 {
    if m == 0 {
        0.0
    } else {
        2.0 * m as f64 + 2.0
    }
}

/// Shape of a one-level broom: the root enumerates `s(X)` over `width`
/// values, each followed by `shared` padding; child `i` accepts only
/// `X = first[i]` and then runs `private` padding.
#[derive(Clone, Debug)]
pub struct BroomSpec {
    pub first: Vec<usize>,
    pub width: usize,
    pub shared: usize,
    pub private: usize,
}

impl BroomSpec {
    /// Every child accepts the first root solution, so all `t_i` are equal.
    pub fn uniform(n: usize, shared: usize, private: usize) -> BroomSpec {
        BroomSpec {
            first: vec![1; n],
            width: 1,
            shared,
            private,
        }
    }

    /// Children accept random root solutions among `width`.
    pub fn skewed(n: usize, width: usize, shared: usize, private: usize, seed: u64) -> BroomSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BroomSpec {
            first: (0..n).map(|_| rng.gen_range(1..=width)).collect(),
            width,
            shared,
            private,
        }
    }

    /// All children but the last accept the first root solution; the last
    /// needs all `width` of them.
    pub fn lopsided(n: usize, width: usize, shared: usize, private: usize) -> BroomSpec {
        let mut first = vec![1; n];
        first[n - 1] = width;
        BroomSpec {
            first,
            width,
            shared,
            private,
        }
    }
}

/// Builds the broom described by `spec` over `examples` empty examples.
pub fn broom(spec: &BroomSpec, examples: usize) -> Workload {
    let mut db = Database::builder(0);
    for i in 1..=spec.width {
        db.fact(atom("s", vec![Term::Int(i as i64)])).unwrap();
    }
    if spec.shared > 0 {
        padding(&mut db, "a", "z", spec.shared);
    }
    if spec.private > 0 {
        padding(&mut db, "w", "l", spec.private);
    }
    for (i, &x) in spec.first.iter().enumerate() {
        db.fact(atom(&format!("h{}", i), vec![Term::Int(x as i64)])).unwrap();
    }
    let mut vars = Vars(0);
    let x = vars.fresh("X");
    let mut root = vec![atom("s", vec![x])];
    root.extend(pad_literals("a", "z", spec.shared, &mut vars));
    let children = (0..spec.first.len())
        .map(|i| {
            let mut c = vec![atom(&format!("h{}", i), vec![x])];
            c.extend(pad_literals("w", "l", spec.private, &mut vars));
            PackNode::leaf(Conjunction::new(c), i)
        })
        .collect();
    Workload {
        db: with_examples(db, examples),
        pack: QueryPack::new(PackNode::branch(Conjunction::new(root), children)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{evaluate_pack_on_examples, Strategy};

    #[test]
    fn uniform_pack_work_is_as_constructed() {
        let w = uniform_pack(3, 2, &[5, 0, 2], 2);
        assert_eq!((w.pack.query_count, w.pack.depth, w.pack.max_branching), (9, 2, 3));
        let (rs, c) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Packed).unwrap();
        assert!((0..9).all(|q| rs.count(q) == 2));
        let per_level: Vec<f64> = [5, 0, 2].iter().map(|&m| padding_work(m)).collect();
        let expect = 2.0 * (per_level[0] + 3.0 * per_level[1] + 9.0 * per_level[2]);
        assert_eq!(c.total_work() as f64, expect);
        let (_, dj) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Disjoint).unwrap();
        assert_eq!(dj.total_work() as f64, 2.0 * 9.0 * per_level.iter().sum::<f64>());
    }

    #[test]
    fn brooms_succeed_everywhere() {
        for spec in [
            BroomSpec::uniform(4, 3, 2),
            BroomSpec::skewed(5, 6, 0, 1, 3),
            BroomSpec::lopsided(3, 9, 2, 0),
        ] {
            let w = broom(&spec, 1);
            let (rs, _) = evaluate_pack_on_examples(&w.pack, &w.db, &[], Strategy::Packed).unwrap();
            assert!((0..spec.first.len()).all(|q| rs.get(q, 0)));
        }
    }
}
