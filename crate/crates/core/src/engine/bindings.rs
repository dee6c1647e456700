use crate::datastore::{Atom, Term, Var};

/// Variable store with a trail. Every binding is trailed so that undoing to
/// a mark restores the exact earlier state.
#[derive(Clone, Debug, Default)]
pub(crate) struct Bindings {
    slots: Vec<Option<Term>>,
    trail: Vec<u32>,
    /// Ids from here on are free for renamed clause variables.
    pub(crate) next_fresh: u32,
}

impl Bindings {
    pub(crate) fn new(reserved: u32) -> Bindings {
        Bindings {
            slots: vec![None; reserved as usize],
            trail: Vec::new(),
            next_fresh: reserved,
        }
    }

    pub(crate) fn mark(&self) -> usize {
        self.trail.len()
    }

    pub(crate) fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.slots[v as usize] = None;
        }
    }

    /// Reserves `n` fresh variable ids and returns the first.
    pub(crate) fn alloc(&mut self, n: u32) -> u32 {
        let base = self.next_fresh;
        self.next_fresh += n;
        if self.slots.len() < self.next_fresh as usize {
            self.slots.resize(self.next_fresh as usize, None);
        }
        base
    }

    pub(crate) fn walk(&self, t: Term) -> Term {
        let mut cur = t;
        while let Term::Var(v) = cur {
            match self.slots.get(v.id as usize).copied().flatten() {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur
    }

    pub(crate) fn bind(&mut self, v: Var, t: Term) {
        let i = v.id as usize;
        if self.slots.len() <= i {
            self.slots.resize(i + 1, None);
        }
        debug_assert!(self.slots[i].is_none());
        self.slots[i] = Some(t);
        self.trail.push(v.id);
    }

    /// Unifies two terms, leaving partial bindings on the trail on failure.
    pub(crate) fn unify(&mut self, a: Term, b: Term) -> bool {
        let a = self.walk(a);
        let b = self.walk(b);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                self.bind(x, t);
                true
            }
            (x, y) => x == y,
        }
    }

    pub(crate) fn unify_args(&mut self, goal: &Atom, other: &Atom) -> bool {
        goal.args.len() == other.args.len()
            && goal.args.iter().zip(&other.args).all(|(&a, &b)| self.unify(a, b))
    }

    pub(crate) fn resolve(&self, a: &Atom) -> Atom {
        Atom {
            pred: a.pred,
            args: a.args.iter().map(|&t| self.walk(t)).collect(),
            builtin: a.builtin,
        }
    }
}
