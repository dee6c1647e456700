use super::term::{Atom, Conjunction, Substitution, Term};

/// Most general extension of `s` that makes `a` and `b` identical, or `None`.
/// `s` itself is left untouched.
pub fn unify(a: &Atom, b: &Atom, s: &Substitution) -> Option<Substitution> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    let mut out = s.clone();
    for (x, y) in a.args.iter().zip(&b.args) {
        if !unify_terms(x, y, &mut out) {
            return None;
        }
    }
    Some(out)
}

pub(crate) fn unify_terms(x: &Term, y: &Term, s: &mut Substitution) -> bool {
    let x = s.walk(x);
    let y = s.walk(y);
    if x == y {
        return true;
    }
    match (x, y) {
        (Term::Var(v), t) | (t, Term::Var(v)) => {
            s.bind(v, t);
            true
        }
        _ => false,
    }
}

pub fn apply_atom(s: &Substitution, a: &Atom) -> Atom {
    Atom {
        pred: a.pred,
        args: a.args.iter().map(|t| s.walk(t)).collect(),
        builtin: a.builtin,
    }
}

/// Replaces every bound variable by its dereferenced value.
pub fn apply(s: &Substitution, c: &Conjunction) -> Conjunction {
    Conjunction {
        atoms: c.atoms.iter().map(|a| apply_atom(s, a)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datastore::term::Var;

    fn v(id: u32, n: &str) -> Term {
        Term::Var(Var::new(id, n))
    }

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn single_binding() {
        let s = unify(&Atom::new("p", vec![v(0, "X")]), &Atom::new("p", vec![c("a")]), &Substitution::new()).unwrap();
        assert_eq!(s.walk(&v(0, "X")), c("a"));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn constant_clash() {
        let s = Substitution::new();
        assert!(unify(&Atom::new("p", vec![c("a")]), &Atom::new("p", vec![c("b")]), &s).is_none());
        assert!(unify(&Atom::new("p", vec![c("a")]), &Atom::new("q", vec![c("a")]), &s).is_none());
    }

    #[test]
    fn failure_leaves_input_untouched() {
        let mut s = Substitution::new();
        s.bind(Var::new(5, "Z"), c("z"));
        let before = s.clone();
        let a = Atom::new("q", vec![v(0, "X"), c("a")]);
        let b = Atom::new("q", vec![c("b"), c("c")]);
        assert!(unify(&a, &b, &s).is_none());
        assert_eq!(s, before);
    }

    /// q(X,X) against q(a,Y): enumerate every grounding of {X,Y} over the
    /// constants {a} and keep those making the atoms equal; the unifier must
    /// produce exactly that grounding.
    #[test]
    fn shared_variable_unifier_matches_enumeration() {
        let a = Atom::new("q", vec![v(0, "X"), v(0, "X")]);
        let b = Atom::new("q", vec![c("a"), v(1, "Y")]);
        let s = unify(&a, &b, &Substitution::new()).unwrap();

        let domain = [c("a")];
        let mut groundings = Vec::new();
        for x in domain {
            for y in domain {
                let mut g = Substitution::new();
                g.bind(Var::new(0, "X"), x);
                g.bind(Var::new(1, "Y"), y);
                if apply_atom(&g, &a) == apply_atom(&g, &b) {
                    groundings.push((x, y));
                }
            }
        }
        assert_eq!(groundings, vec![(c("a"), c("a"))]);
        assert_eq!(s.walk(&v(0, "X")), c("a"));
        assert_eq!(s.walk(&v(1, "Y")), c("a"));
        assert_eq!(apply_atom(&s, &a), apply_atom(&s, &b));
    }

    #[test]
    fn apply_follows_chains() {
        let mut s = Substitution::new();
        s.bind(Var::new(0, "X"), v(1, "Y"));
        s.bind(Var::new(1, "Y"), c("b"));
        let conj = Conjunction::new(vec![Atom::new("p", vec![v(0, "X")])]);
        assert_eq!(apply(&s, &conj).to_string(), "p(b)");
    }

    #[test]
    fn apply_identity_and_partial() {
        let conj = Conjunction::new(vec![
            Atom::new("p", vec![v(0, "X")]),
            Atom::new("q", vec![v(0, "X"), v(1, "Y")]),
        ]);
        assert_eq!(apply(&Substitution::new(), &conj), conj);
        let mut s = Substitution::new();
        s.bind(Var::new(0, "X"), c("a"));
        assert_eq!(apply(&s, &conj).to_string(), "p(a), q(a,Y)");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn term() -> impl Strategy<Value = Term> {
            prop_oneof![
                (0u32..4).prop_map(|i| Term::Var(Var::new(i, "V"))),
                prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
                (0i64..2).prop_map(Term::Int),
            ]
        }

        fn atom() -> impl Strategy<Value = Atom> {
            prop::collection::vec(term(), 3).prop_map(|args| Atom::new("r", args))
        }

        proptest! {
            #[test]
            fn unification_is_symmetric_and_equalizing(a in atom(), b in atom()) {
                let s0 = Substitution::new();
                let ab = unify(&a, &b, &s0);
                let ba = unify(&b, &a, &s0);
                prop_assert_eq!(ab.is_some(), ba.is_some());
                if let (Some(ab), Some(ba)) = (ab, ba) {
                    prop_assert_eq!(apply_atom(&ab, &a), apply_atom(&ab, &b));
                    // Both unifiers are most general, so they agree up to
                    // variable renaming: the induced equalities coincide.
                    for x in a.args.iter().chain(&b.args) {
                        for y in a.args.iter().chain(&b.args) {
                            prop_assert_eq!(ab.walk(x) == ab.walk(y), ba.walk(x) == ba.walk(y));
                        }
                    }
                    let once = apply_atom(&ab, &a);
                    prop_assert_eq!(apply_atom(&ab, &once), once);
                }
            }
        }
    }
}
