use std::borrow::Cow;
use std::cmp::Ordering;

use crate::datastore::{compare_ground, Atom, Builtin, Clause, Conjunction, Database, Example, FactTable, Substitution, Term, Var};

use super::bindings::Bindings;
use super::{EvalError, Strategy, WorkCounters};

/// Evaluation context shared by all cursors of one worker.
pub(crate) struct Ctx<'a> {
    pub db: &'a Database,
    pub example: Option<&'a Example>,
    pub b: Bindings,
    pub counters: WorkCounters,
    /// Counter slot that literal calls and attempts are charged to.
    pub active: usize,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(db: &'a Database, reserved: u32, counters: WorkCounters) -> Ctx<'a> {
        Ctx {
            db,
            example: None,
            b: Bindings::new(reserved),
            counters,
            active: 0,
        }
    }

    fn call(&mut self) {
        self.counters.nodes[self.active].literal_calls += 1;
        self.counters.global.literal_calls += 1;
    }

    fn attempt(&mut self) {
        self.counters.nodes[self.active].attempts += 1;
    }
}

struct Scan<'a> {
    rows: &'a [Atom],
    /// Row positions from the first-argument index, when that argument is bound.
    sel: Option<&'a [u32]>,
    pos: usize,
}

impl<'a> Scan<'a> {
    fn new(table: Option<&'a FactTable>, first: Option<Term>) -> Scan<'a> {
        let Some(t) = table else {
            return Scan {
                rows: &[],
                sel: None,
                pos: 0,
            };
        };
        Scan {
            rows: t.rows(),
            sel: first.map(|f| t.with_first(&f)),
            pos: 0,
        }
    }

    fn next(&mut self) -> Option<&'a Atom> {
        let row = match self.sel {
            Some(sel) => &self.rows[*sel.get(self.pos)? as usize],
            None => self.rows.get(self.pos)?,
        };
        self.pos += 1;
        Some(row)
    }
}

enum Alts<'a> {
    Builtin {
        tried: bool,
    },
    Store {
        /// Background facts, then the example's own facts.
        scans: [Scan<'a>; 2],
        current: usize,
        rules: &'a [Clause],
        next_rule: usize,
        body: Option<Box<Cursor<'a>>>,
    },
}

/// Choice point of one entered literal.
struct Frame<'a> {
    trail_mark: usize,
    fresh_mark: u32,
    alts: Alts<'a>,
}

/// Depth-first, left-to-right SLD enumeration of one conjunction.
pub(crate) struct Cursor<'a> {
    goals: Cow<'a, [Atom]>,
    frames: Vec<Frame<'a>>,
    started: bool,
    done: bool,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(goals: Cow<'a, [Atom]>) -> Cursor<'a> {
        Cursor {
            goals,
            frames: Vec::new(),
            started: false,
            done: false,
        }
    }

    /// Advances to the next solution, leaving its bindings in `ctx.b`.
    pub(crate) fn next_solution(&mut self, ctx: &mut Ctx<'a>) -> Result<bool, EvalError> {
        if self.done {
            return Ok(false);
        }
        if !self.started {
            self.started = true;
            if self.goals.is_empty() {
                return Ok(true);
            }
            self.push(ctx);
        } else if self.goals.is_empty() {
            self.done = true;
            return Ok(false);
        }
        loop {
            let depth = self.frames.len();
            let Some(top) = self.frames.last_mut() else {
                self.done = true;
                return Ok(false);
            };
            if advance(&self.goals[depth - 1], top, ctx)? {
                if depth == self.goals.len() {
                    return Ok(true);
                }
                self.push(ctx);
            } else {
                let f = self.frames.pop().unwrap();
                ctx.b.undo(f.trail_mark);
                ctx.b.next_fresh = f.fresh_mark;
            }
        }
    }

    fn push(&mut self, ctx: &mut Ctx<'a>) {
        let goal = &self.goals[self.frames.len()];
        ctx.call();
        let alts = if goal.builtin.is_some() {
            Alts::Builtin { tried: false }
        } else {
            ctx.counters.global.fact_lookups += 1;
            let key = goal.key();
            let first = goal.args.first().map(|&t| ctx.b.walk(t)).filter(Term::is_ground);
            Alts::Store {
                scans: [
                    Scan::new(ctx.db.background(&key), first),
                    Scan::new(ctx.example.and_then(|e| e.facts(&key)), first),
                ],
                current: 0,
                rules: ctx.db.rules(&key),
                next_rule: 0,
                body: None,
            }
        };
        self.frames.push(Frame {
            trail_mark: ctx.b.mark(),
            fresh_mark: ctx.b.next_fresh,
            alts,
        });
    }
}

fn advance<'a>(goal: &Atom, frame: &mut Frame<'a>, ctx: &mut Ctx<'a>) -> Result<bool, EvalError> {
    match &mut frame.alts {
        Alts::Builtin { tried } => {
            if *tried {
                return Ok(false);
            }
            *tried = true;
            ctx.attempt();
            ctx.counters.global.builtin_evals += 1;
            eval_builtin(goal, ctx)
        }
        Alts::Store {
            scans,
            current,
            rules,
            next_rule,
            body,
        } => loop {
            if let Some(c) = body {
                if c.next_solution(ctx)? {
                    return Ok(true);
                }
                *body = None;
            }
            ctx.b.undo(frame.trail_mark);
            ctx.b.next_fresh = frame.fresh_mark;
            while *current < scans.len() {
                match scans[*current].next() {
                    Some(row) => {
                        ctx.attempt();
                        ctx.counters.global.unification_attempts += 1;
                        if ctx.b.unify_args(goal, row) {
                            return Ok(true);
                        }
                        ctx.b.undo(frame.trail_mark);
                    }
                    None => *current += 1,
                }
            }
            let Some(clause) = rules.get(*next_rule) else {
                return Ok(false);
            };
            *next_rule += 1;
            ctx.attempt();
            ctx.counters.global.unification_attempts += 1;
            let base = ctx.b.alloc(clause.var_count);
            if ctx.b.unify_args(goal, &rename(&clause.head, base)) {
                ctx.counters.global.rule_expansions += 1;
                let atoms: Vec<Atom> = clause.body.atoms.iter().map(|a| rename(a, base)).collect();
                *body = Some(Box::new(Cursor::new(Cow::Owned(atoms))));
            }
        },
    }
}

fn rename(a: &Atom, base: u32) -> Atom {
    Atom {
        pred: a.pred,
        args: a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Term::Var(Var {
                    id: base + v.id,
                    name: v.name,
                }),
                other => *other,
            })
            .collect(),
        builtin: a.builtin,
    }
}

fn eval_builtin(goal: &Atom, ctx: &mut Ctx<'_>) -> Result<bool, EvalError> {
    let op = goal.builtin.expect("builtin literal");
    let a = ctx.b.walk(goal.args[0]);
    let b = ctx.b.walk(goal.args[1]);
    if op == Builtin::Unify {
        return Ok(ctx.b.unify(a, b));
    }
    if !a.is_ground() || !b.is_ground() {
        return Err(EvalError::BuiltinMode {
            literal: ctx.b.resolve(goal).to_string(),
        });
    }
    let ord = compare_ground(&a, &b).expect("ground terms compare");
    Ok(match op {
        Builtin::NotEqual => a != b,
        Builtin::Less => ord == Ordering::Less,
        Builtin::LessEq => ord != Ordering::Greater,
        Builtin::Unify => unreachable!(),
    })
}

/// Enumerates the solutions of a conjunction against a database, optionally
/// restricted to the facts visible in one example.
pub struct SolutionCursor<'a> {
    ctx: Ctx<'a>,
    cursor: Cursor<'a>,
    vars: Vec<Var>,
    seed: Substitution,
}

impl<'a> SolutionCursor<'a> {
    pub fn new(db: &'a Database, example: Option<&'a Example>, conj: &Conjunction, seed: &Substitution) -> SolutionCursor<'a> {
        let mut reserved = conj.max_var_id().map_or(0, |m| m + 1);
        for (id, t) in seed.iter() {
            reserved = reserved.max(id + 1);
            if let Term::Var(v) = t {
                reserved = reserved.max(v.id + 1);
            }
        }
        let counters = WorkCounters::with_layout(Strategy::Separate, vec![0], 1, 1);
        let mut ctx = Ctx::new(db, reserved, counters);
        ctx.example = example;
        for (id, t) in seed.iter() {
            let v = Var { id, name: var_name(conj, id) };
            ctx.b.unify(Term::Var(v), *t);
        }
        SolutionCursor {
            ctx,
            cursor: Cursor::new(Cow::Owned(conj.atoms.clone())),
            vars: conj.vars(),
            seed: seed.clone(),
        }
    }

    /// The next solution: the seed extended with the bindings of the
    /// conjunction's variables.
    pub fn next_solution(&mut self) -> Result<Option<Substitution>, EvalError> {
        if !self.cursor.next_solution(&mut self.ctx)? {
            return Ok(None);
        }
        let mut out = self.seed.clone();
        for &v in &self.vars {
            let t = self.ctx.b.walk(Term::Var(v));
            if t != Term::Var(v) {
                out.bind(v, t);
            }
        }
        Ok(Some(out))
    }

    pub fn counters(&self) -> &WorkCounters {
        &self.ctx.counters
    }
}

fn var_name(conj: &Conjunction, id: u32) -> crate::datastore::Sym {
    conj.vars()
        .into_iter()
        .find(|v| v.id == id)
        .map_or_else(|| crate::datastore::Sym::intern("_"), |v| v.name)
}

/// All solutions of `conj`, in enumeration order.
pub fn solutions(db: &Database, example: Option<&Example>, conj: &Conjunction) -> Result<Vec<Substitution>, EvalError> {
    let mut c = SolutionCursor::new(db, example, conj, &Substitution::new());
    let mut out = Vec::new();
    while let Some(s) = c.next_solution()? {
        out.push(s);
    }
    Ok(out)
}
