use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::symbol::Sym;

/// A logical variable. Identity is the numeric id; the name is kept for
/// printing only.
#[derive(Clone, Copy)]
pub struct Var {
    pub id: u32,
    pub name: Sym,
}

impl Var {
    pub fn new(id: u32, name: &str) -> Var {
        Var {
            id,
            name: Sym::intern(name),
        }
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.id.cmp(&other.id)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.name, self.id)
    }
}

/// Function-free terms only.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Const(Sym),
    Int(i64),
    Var(Var),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::Const(Sym::intern(name))
    }

    pub fn is_ground(&self) -> bool {
        !matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }
}

/// Standard order used by `<` and `=<`: integers before constants, integers
/// numerically, constants by name.
pub(crate) fn compare_ground(a: &Term, b: &Term) -> Option<std::cmp::Ordering> {
    match (a, b) {
        (Term::Int(x), Term::Int(y)) => Some(x.cmp(y)),
        (Term::Int(_), Term::Const(_)) => Some(std::cmp::Ordering::Less),
        (Term::Const(_), Term::Int(_)) => Some(std::cmp::Ordering::Greater),
        (Term::Const(x), Term::Const(y)) => Some(x.as_str().cmp(y.as_str())),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Builtin {
    /// `=`: unification.
    Unify,
    /// `\=`: ground inequality.
    NotEqual,
    /// `<`
    Less,
    /// `=<`
    LessEq,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "=" => Some(Builtin::Unify),
            "\\=" => Some(Builtin::NotEqual),
            "<" => Some(Builtin::Less),
            "=<" => Some(Builtin::LessEq),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Unify => "=",
            Builtin::NotEqual => "\\=",
            Builtin::Less => "<",
            Builtin::LessEq => "=<",
        }
    }
}

/// Predicate name plus arity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PredKey {
    pub name: Sym,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: &str, arity: usize) -> PredKey {
        PredKey {
            name: Sym::intern(name),
            arity,
        }
    }

    /// Ordering by name text, then arity. Used for canonical output.
    pub fn canonical_cmp(&self, other: &PredKey) -> std::cmp::Ordering {
        self.name
            .as_str()
            .cmp(other.name.as_str())
            .then(self.arity.cmp(&other.arity))
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
    pub builtin: Option<Builtin>,
}

impl Atom {
    /// Builds an atom, flagging it as a builtin when the name is one of the
    /// comparison operators and the arity is 2.
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom::from_sym(Sym::intern(pred), args)
    }

    pub fn from_sym(pred: Sym, args: Vec<Term>) -> Atom {
        let builtin = if args.len() == 2 {
            Builtin::from_name(pred.as_str())
        } else {
            None
        };
        Atom {
            pred,
            args,
            builtin,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> PredKey {
        PredKey {
            name: self.pred,
            arity: self.args.len(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.args.iter().filter_map(Term::as_var)
    }
}

/// Ordered conjunction, evaluated left to right.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Conjunction {
    pub atoms: Vec<Atom>,
}

impl Conjunction {
    pub fn new(atoms: Vec<Atom>) -> Conjunction {
        Conjunction { atoms }
    }

    pub fn empty() -> Conjunction {
        Conjunction::default()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    /// Distinct variables in first-occurrence order.
    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        for v in self.atoms.iter().flat_map(Atom::vars) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn max_var_id(&self) -> Option<u32> {
        self.atoms.iter().flat_map(Atom::vars).map(|v| v.id).max()
    }

    pub fn concat(&self, other: &Conjunction) -> Conjunction {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Conjunction { atoms }
    }
}

impl From<Vec<Atom>> for Conjunction {
    fn from(atoms: Vec<Atom>) -> Self {
        Conjunction { atoms }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clause {
    pub head: Atom,
    pub body: Conjunction,
    /// Variable ids in a clause are `0..var_count`.
    pub var_count: u32,
}

/// Variable bindings. Bound values are kept dereferenced when read through
/// [`Substitution::walk`].
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Substitution {
    bindings: BTreeMap<u32, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Raw binding, not dereferenced.
    pub fn get(&self, v: Var) -> Option<&Term> {
        self.bindings.get(&v.id)
    }

    pub fn bind(&mut self, v: Var, t: Term) {
        self.bindings.insert(v.id, t);
    }

    /// Follows binding chains to the final value.
    pub fn walk(&self, t: &Term) -> Term {
        let mut cur = *t;
        while let Term::Var(v) = cur {
            match self.bindings.get(&v.id) {
                Some(next) if *next != cur => cur = *next,
                _ => break,
            }
        }
        cur
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Term)> {
        self.bindings.iter().map(|(k, v)| (*k, v))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (id, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let shown = match t {
                Term::Var(_) => self.walk(t),
                _ => *t,
            };
            write!(f, "_{}↦{}", id, shown)?;
        }
        f.write_str("}")
    }
}

fn needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => !chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => true,
    }
}

pub(crate) fn write_constant(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if needs_quotes(name) {
        f.write_char('\'')?;
        for c in name.chars() {
            if c == '\'' || c == '\\' {
                f.write_char('\\')?;
            }
            f.write_char(c)?;
        }
        f.write_char('\'')
    } else {
        f.write_str(name)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(s) => write_constant(f, s.as_str()),
            Term::Int(i) => write!(f, "{}", i),
            Term::Var(v) => write!(f, "{}", v.name),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(b) = self.builtin {
            return write!(f, "{} {} {}", self.args[0], b.name(), self.args[1]);
        }
        write_constant(f, self.pred.as_str())?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", a)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", a)?;
        }
        Ok(())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.body.is_empty() {
            write!(f, "{}.", self.head)
        } else {
            write!(f, "{} :- {}.", self.head, self.body)
        }
    }
}
