use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use super::syntax::{tokenize, ParseError, Pos, Tok, TokenStream, VarScope};
use super::term::{Atom, Clause, Conjunction, PredKey, Term};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("recursive rules are not supported: {cycle}")]
    Recursion { cycle: String },
    #[error("line {line}: fact `{fact}` is not ground")]
    NonGroundFact { line: usize, fact: String },
    #[error("line {line}: clause `{clause}` is not range-restricted")]
    RangeRestriction { line: usize, clause: String },
    #[error("line {line}: `{pred}` is a builtin and cannot be defined")]
    BuiltinHead { line: usize, pred: String },
    #[error("line {line}: rules are only allowed in the background section")]
    RuleInExample { line: usize },
    #[error("line {line}: example key has {found} terms, expected {expected}")]
    KeyArity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate example {what}")]
    DuplicateExample { line: usize, what: String },
}

/// Ground facts of one predicate, in load order, with a hash index on the
/// first argument.
#[derive(Clone, Debug, Default)]
pub struct FactTable {
    rows: Vec<Atom>,
    by_first: HashMap<Term, Vec<u32>>,
}

impl PartialEq for FactTable {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
    }
}

impl Eq for FactTable {}

impl FactTable {
    fn push(&mut self, fact: Atom) {
        if let Some(first) = fact.args.first() {
            self.by_first
                .entry(*first)
                .or_default()
                .push(self.rows.len() as u32);
        }
        self.rows.push(fact);
    }

    pub fn rows(&self) -> &[Atom] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row positions whose first argument equals `first`.
    pub fn with_first(&self, first: &Term) -> &[u32] {
        self.by_first.get(first).map(Vec::as_slice).unwrap_or(&[])
    }
}

pub type FactStore = HashMap<PredKey, FactTable>;

fn store_fact(store: &mut FactStore, fact: Atom) {
    store.entry(fact.key()).or_default().push(fact);
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub id: u64,
    pub key: Vec<Term>,
    pub label: Option<String>,
    facts: FactStore,
}

impl Example {
    pub fn new(id: u64, key: Vec<Term>) -> Example {
        Example {
            id,
            key,
            label: None,
            facts: FactStore::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Example {
        self.label = Some(label.into());
        self
    }

    pub fn add_fact(&mut self, fact: Atom) {
        store_fact(&mut self.facts, fact);
    }

    pub fn facts(&self, pred: &PredKey) -> Option<&FactTable> {
        self.facts.get(pred)
    }

    pub fn fact_count(&self) -> usize {
        self.facts.values().map(FactTable::len).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExampleSet {
    pub key_arity: usize,
    pub examples: Vec<Example>,
}

impl ExampleSet {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }
}

/// Background facts, non-recursive rules and per-example fact partitions.
/// Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Database {
    background: FactStore,
    rules: HashMap<PredKey, Vec<Clause>>,
    pub examples: ExampleSet,
}

impl Database {
    pub fn builder(key_arity: usize) -> DatabaseBuilder {
        DatabaseBuilder {
            db: Database {
                examples: ExampleSet {
                    key_arity,
                    examples: Vec::new(),
                },
                ..Default::default()
            },
            lines: Vec::new(),
        }
    }

    pub fn background(&self, pred: &PredKey) -> Option<&FactTable> {
        self.background.get(pred)
    }

    pub fn rules(&self, pred: &PredKey) -> &[Clause] {
        self.rules.get(pred).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn background_fact_count(&self) -> usize {
        self.background.values().map(FactTable::len).sum()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.values().map(Vec::len).sum()
    }

    pub fn key_arity(&self) -> usize {
        self.examples.key_arity
    }

    /// Canonical text form; `load_program` reads it back to an equal database.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#key {}", self.examples.key_arity);
        write_store(&mut out, &self.background);
        let mut heads: Vec<&PredKey> = self.rules.keys().collect();
        heads.sort_by(|a, b| a.canonical_cmp(b));
        for h in heads {
            for c in &self.rules[h] {
                let _ = writeln!(out, "{}", c);
            }
        }
        for e in &self.examples.examples {
            let _ = write!(out, "#example {} key(", e.id);
            for (i, t) in e.key.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", t);
            }
            out.push_str(").");
            if let Some(l) = &e.label {
                out.push_str(" label(");
                let _ = super::term::write_constant(&mut out, l);
                out.push_str(").");
            }
            out.push('\n');
            write_store(&mut out, &e.facts);
        }
        out
    }
}

fn write_store(out: &mut String, store: &FactStore) {
    let mut preds: Vec<&PredKey> = store.keys().collect();
    preds.sort_by(|a, b| a.canonical_cmp(b));
    for p in preds {
        for f in store[p].rows() {
            let _ = writeln!(out, "{}.", f);
        }
    }
}

/// Background facts of `pred` followed by the example's own facts of `pred`.
pub fn facts_visible<'a>(
    db: &'a Database,
    example: &'a Example,
    pred: &PredKey,
) -> impl Iterator<Item = &'a Atom> + 'a {
    let bg = db.background(pred).map(FactTable::rows).unwrap_or(&[]);
    let local = example.facts(pred).map(FactTable::rows).unwrap_or(&[]);
    bg.iter().chain(local.iter())
}

/// Collects facts, rules and examples, then checks the database invariants.
pub struct DatabaseBuilder {
    db: Database,
    /// Source line of each rule, for diagnostics.
    lines: Vec<(PredKey, usize)>,
}

impl DatabaseBuilder {
    pub fn fact(&mut self, fact: Atom) -> Result<&mut Self, LoadError> {
        self.fact_at(fact, 0)
    }

    fn fact_at(&mut self, fact: Atom, line: usize) -> Result<&mut Self, LoadError> {
        check_fact(&fact, line)?;
        store_fact(&mut self.db.background, fact);
        Ok(self)
    }

    pub fn rule(&mut self, clause: Clause) -> Result<&mut Self, LoadError> {
        self.rule_at(clause, 0)
    }

    fn rule_at(&mut self, clause: Clause, line: usize) -> Result<&mut Self, LoadError> {
        if clause.head.builtin.is_some() {
            return Err(LoadError::BuiltinHead {
                line,
                pred: clause.head.pred.to_string(),
            });
        }
        let body_vars: HashSet<_> = clause.body.atoms.iter().flat_map(Atom::vars).collect();
        if clause.head.vars().any(|v| !body_vars.contains(&v)) {
            return Err(LoadError::RangeRestriction {
                line,
                clause: clause.to_string(),
            });
        }
        let key = clause.head.key();
        self.lines.push((key, line));
        self.db.rules.entry(key).or_default().push(clause);
        Ok(self)
    }

    pub fn example(&mut self, example: Example) -> Result<&mut Self, LoadError> {
        self.example_at(example, 0)
    }

    fn example_at(&mut self, example: Example, line: usize) -> Result<&mut Self, LoadError> {
        let expected = self.db.examples.key_arity;
        if example.key.len() != expected {
            return Err(LoadError::KeyArity {
                line,
                expected,
                found: example.key.len(),
            });
        }
        if let Some(t) = example.key.iter().find(|t| !t.is_ground()) {
            return Err(LoadError::NonGroundFact {
                line,
                fact: format!("key term {}", t),
            });
        }
        for f in example.facts.values().flat_map(FactTable::rows) {
            check_fact(f, line)?;
        }
        for e in &self.db.examples.examples {
            if e.id == example.id {
                return Err(LoadError::DuplicateExample {
                    line,
                    what: format!("id {}", e.id),
                });
            }
            if expected > 0 && e.key == example.key {
                let key: Vec<String> = e.key.iter().map(Term::to_string).collect();
                return Err(LoadError::DuplicateExample {
                    line,
                    what: format!("key ({})", key.join(",")),
                });
            }
        }
        self.db.examples.examples.push(example);
        Ok(self)
    }

    pub fn build(self) -> Result<Database, LoadError> {
        check_acyclic(&self.db.rules)?;
        Ok(self.db)
    }
}

fn check_fact(fact: &Atom, line: usize) -> Result<(), LoadError> {
    if fact.builtin.is_some() {
        return Err(LoadError::BuiltinHead {
            line,
            pred: fact.pred.to_string(),
        });
    }
    if !fact.is_ground() {
        return Err(LoadError::NonGroundFact {
            line,
            fact: fact.to_string(),
        });
    }
    Ok(())
}

fn check_acyclic(rules: &HashMap<PredKey, Vec<Clause>>) -> Result<(), LoadError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }

    fn visit(
        p: PredKey,
        rules: &HashMap<PredKey, Vec<Clause>>,
        marks: &mut HashMap<PredKey, Mark>,
        path: &mut Vec<PredKey>,
    ) -> Result<(), LoadError> {
        match marks.get(&p) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => {
                let start = path.iter().position(|q| *q == p).unwrap_or(0);
                let mut names: Vec<String> = path[start..].iter().map(|q| q.to_string()).collect();
                names.push(p.to_string());
                return Err(LoadError::Recursion {
                    cycle: names.join(" -> "),
                });
            }
            None => {}
        }
        marks.insert(p, Mark::Active);
        path.push(p);
        if let Some(clauses) = rules.get(&p) {
            for c in clauses {
                for a in c.body.atoms.iter().filter(|a| a.builtin.is_none()) {
                    visit(a.key(), rules, marks, path)?;
                }
            }
        }
        path.pop();
        marks.insert(p, Mark::Done);
        Ok(())
    }

    let mut heads: Vec<PredKey> = rules.keys().copied().collect();
    heads.sort_by(|a, b| a.canonical_cmp(b));
    let mut marks = HashMap::new();
    for h in heads {
        visit(h, rules, &mut marks, &mut Vec::new())?;
    }
    Ok(())
}

/// Reads the fact/rule/example text format.
///
/// ```text
/// #key 1
/// parent(ann,bob).
/// gp(X,Y) :- parent(X,Z), parent(Z,Y).
/// #example 0 key(ann). label(pos).
/// male(ann).
/// ```
pub fn load_program(text: &str) -> Result<Database, LoadError> {
    let toks = tokenize(text)?;
    let mut ts = TokenStream::new(&toks);

    let mut key_arity = 0;
    if let Some(Tok::Directive(d)) = ts.peek() {
        if let Some(rest) = d.strip_prefix("key") {
            let pos = ts.pos();
            key_arity = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| ParseError::new(pos, format!("bad key arity `{}`", rest.trim())))?;
            ts.next();
        }
    }

    let mut builder = Database::builder(key_arity);
    let mut current: Option<(Example, usize)> = None;

    while let Some(tok) = ts.peek() {
        let pos = ts.pos();
        if let Tok::Directive(d) = tok {
            ts.next();
            if let Some(rest) = d.strip_prefix("example") {
                if let Some((e, line)) = current.take() {
                    builder.example_at(e, line)?;
                }
                current = Some((parse_example_header(rest, pos)?, pos.line));
            } else if d.starts_with("key") {
                return Err(ParseError::new(pos, "`#key` must be the first directive").into());
            } else {
                return Err(ParseError::new(pos, format!("unknown directive `#{}`", d)).into());
            }
            continue;
        }

        let mut scope = VarScope::new();
        let head = ts.literal(&mut scope)?;
        if ts.eat(&Tok::Neck) {
            let mut body = vec![ts.literal(&mut scope)?];
            while ts.eat(&Tok::Comma) {
                body.push(ts.literal(&mut scope)?);
            }
            ts.expect(&Tok::Dot)?;
            if current.is_some() {
                return Err(LoadError::RuleInExample { line: pos.line });
            }
            builder.rule_at(
                Clause {
                    head,
                    body: Conjunction::new(body),
                    var_count: scope.count(),
                },
                pos.line,
            )?;
        } else {
            ts.expect(&Tok::Dot)?;
            match &mut current {
                Some((e, _)) => {
                    check_fact(&head, pos.line)?;
                    e.add_fact(head);
                }
                None => {
                    builder.fact_at(head, pos.line)?;
                }
            }
        }
    }
    if let Some((e, line)) = current.take() {
        builder.example_at(e, line)?;
    }
    builder.build()
}

fn parse_example_header(text: &str, at: Pos) -> Result<Example, ParseError> {
    // Positions inside the directive are reported relative to its line.
    let shift = |e: ParseError| ParseError {
        line: at.line,
        col: at.col + e.col,
        message: e.message,
    };
    let toks = tokenize(text).map_err(shift)?;
    let mut ts = TokenStream::new(&toks);
    let id = match ts.next() {
        Some(Tok::Int(i)) if *i >= 0 => *i as u64,
        _ => return Err(ParseError::new(at, "expected a non-negative example id")),
    };
    if ts.next() != Some(&Tok::Name("key".into())) {
        return Err(ParseError::new(at, "expected `key(...)` after example id"));
    }
    ts.expect(&Tok::LParen).map_err(shift)?;
    let mut key = Vec::new();
    if !ts.eat(&Tok::RParen) {
        loop {
            match ts.next() {
                Some(Tok::Name(n)) => key.push(Term::constant(n)),
                Some(Tok::Int(i)) => key.push(Term::Int(*i)),
                _ => return Err(ParseError::new(at, "example keys must be ground constants")),
            }
            if ts.eat(&Tok::Comma) {
                continue;
            }
            ts.expect(&Tok::RParen).map_err(shift)?;
            break;
        }
    }
    ts.expect(&Tok::Dot).map_err(shift)?;
    let mut example = Example::new(id, key);
    if ts.eat(&Tok::Name("label".into())) {
        ts.expect(&Tok::LParen).map_err(shift)?;
        let label = match ts.next() {
            Some(Tok::Name(n)) => n.clone(),
            Some(Tok::Int(i)) => i.to_string(),
            _ => return Err(ParseError::new(at, "expected a label name")),
        };
        ts.expect(&Tok::RParen).map_err(shift)?;
        ts.expect(&Tok::Dot).map_err(shift)?;
        example.label = Some(label);
    }
    if !ts.at_end() {
        return Err(ParseError::new(at, "trailing text after example header"));
    }
    Ok(example)
}
