use std::borrow::Cow;
use std::ops::Range;

use crate::datastore::{Conjunction, Database, Example, Term, Var};
use crate::packtree::QueryPack;

use super::cursor::{Ctx, Cursor};
use super::state::{FlatPack, PackState};
use super::{EvalError, ResultSet, Strategy, TraceEvent, WorkCounters};

/// Evaluates every query of a pack on the examples of a database under one
/// strategy. Owns its mutable state, so one evaluator serves one worker.
pub struct PackEvaluator<'a> {
    db: &'a Database,
    strategy: Strategy,
    flat: FlatPack<'a>,
    queries: Vec<Conjunction>,
    state: PackState,
    ctx: Ctx<'a>,
    key: Vec<Var>,
    hits: Vec<bool>,
    trace: Option<Vec<TraceEvent>>,
}

impl<'a> PackEvaluator<'a> {
    /// `key` lists the pack variables bound to each example's key tuple.
    pub fn new(pack: &'a QueryPack, db: &'a Database, key: &[Var], strategy: Strategy) -> Result<PackEvaluator<'a>, EvalError> {
        if key.len() != db.key_arity() {
            return Err(EvalError::KeyArityMismatch {
                expected: db.key_arity(),
                found: key.len(),
            });
        }
        let flat = FlatPack::new(pack);
        let queries = pack.queries_by_id();
        let reserved = key.iter().map(|v| v.id + 1).fold(pack.var_bound(), u32::max);
        let counters = match strategy {
            Strategy::Separate => WorkCounters::with_layout(strategy, vec![0; queries.len()], 0, 0),
            _ => WorkCounters::with_layout(strategy, flat.depths(), queries.len(), flat.levels),
        };
        Ok(PackEvaluator {
            db,
            strategy,
            state: PackState::from_flat(&flat),
            flat,
            hits: vec![false; queries.len()],
            queries,
            ctx: Ctx::new(db, reserved, counters),
            key: key.to_vec(),
            trace: None,
        })
    }

    /// Records control events from now on.
    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn counters(&self) -> &WorkCounters {
        &self.ctx.counters
    }

    pub fn state(&self) -> &PackState {
        &self.state
    }

    fn emit(&mut self, ev: TraceEvent) {
        if let Some(t) = &mut self.trace {
            t.push(ev);
        }
    }

    /// Success flags by query id for the example at position `index`.
    pub fn evaluate_example(&mut self, index: usize) -> Result<Vec<bool>, EvalError> {
        let example = &self.db.examples.examples[index];
        self.evaluate_on(Some(example), index)
            .map_err(|e| e.at_example(example.id))
    }

    /// Success flags by query id against the background facts alone.
    pub fn evaluate_background(&mut self) -> Result<Vec<bool>, EvalError> {
        self.evaluate_on(None, 0)
    }

    fn evaluate_on(&mut self, example: Option<&'a Example>, index: usize) -> Result<Vec<bool>, EvalError> {
        self.hits.iter_mut().for_each(|h| *h = false);
        self.ctx.example = example;
        self.ctx.counters.global.examples += 1;
        let mark = self.ctx.b.mark();
        let fresh = self.ctx.b.next_fresh;
        if let Some(e) = example {
            if e.key.len() != self.key.len() {
                return Err(EvalError::KeyArityMismatch {
                    expected: self.key.len(),
                    found: e.key.len(),
                });
            }
            for (v, t) in self.key.iter().zip(&e.key) {
                self.ctx.b.unify(Term::Var(*v), *t);
            }
        }
        let out = match self.strategy {
            Strategy::Packed => {
                self.state.reset();
                self.emit(TraceEvent::Epoch { example: index });
                self.execute_qp(0).map(|_| ())
            }
            Strategy::Disjoint => self.run_disjoint(index),
            Strategy::Separate => self.run_separate(),
        };
        self.ctx.b.undo(mark);
        self.ctx.b.next_fresh = fresh;
        out?;
        Ok(self.hits.clone())
    }

    fn run_disjoint(&mut self, index: usize) -> Result<(), EvalError> {
        for q in 0..self.queries.len() {
            let path = self.flat.path(q);
            self.state.restrict(Some(&path));
            self.emit(TraceEvent::Epoch { example: index });
            let before: Vec<u64> = path.iter().map(|&n| self.ctx.counters.nodes[n as usize].work()).collect();
            self.execute_qp(0)?;
            for (&n, b) in path.iter().zip(before) {
                let depth = self.flat.nodes[n as usize].depth;
                self.ctx.counters.query_level_work[q][depth] += self.ctx.counters.nodes[n as usize].work() - b;
            }
        }
        Ok(())
    }

    fn run_separate(&mut self) -> Result<(), EvalError> {
        for q in 0..self.queries.len() {
            self.ctx.active = q;
            let c = &mut self.ctx.counters.nodes[q];
            c.entries += 1;
            c.next_calls += 1;
            let mark = self.ctx.b.mark();
            let fresh = self.ctx.b.next_fresh;
            let mut cursor = Cursor::new(Cow::Owned(self.queries[q].atoms.clone()));
            let found = cursor.next_solution(&mut self.ctx)?;
            drop(cursor);
            self.ctx.b.undo(mark);
            self.ctx.b.next_fresh = fresh;
            if found {
                self.ctx.counters.nodes[q].solutions += 1;
                self.ctx.counters.global.leaf_successes += 1;
                self.hits[q] = true;
            }
        }
        Ok(())
    }

    /// Runs a node's conjunction, recursing into alive children for every
    /// solution and removing each child that succeeds. Succeeds when no
    /// alive children remain, or for a leaf on its first solution.
    fn execute_qp(&mut self, node: u32) -> Result<bool, EvalError> {
        let n = node as usize;
        self.ctx.counters.nodes[n].entries += 1;
        self.emit(TraceEvent::Enter { node });
        let mark = self.ctx.b.mark();
        let fresh = self.ctx.b.next_fresh;
        let conj = self.flat.nodes[n].conj;
        let leaf = self.flat.nodes[n].leaf;
        let mut cursor = Cursor::new(Cow::Borrowed(conj));
        let result = loop {
            self.ctx.active = n;
            self.ctx.counters.nodes[n].next_calls += 1;
            self.emit(TraceEvent::NextCall { node });
            if !cursor.next_solution(&mut self.ctx)? {
                break false;
            }
            self.ctx.counters.nodes[n].solutions += 1;
            self.emit(TraceEvent::Solution { node });
            if let Some(q) = leaf {
                self.hits[q] = true;
                self.ctx.counters.global.leaf_successes += 1;
                self.emit(TraceEvent::LeafSuccess { query: q });
                break true;
            }
            let mut child = self.state.first(node);
            while let Some(c) = child {
                let next = self.state.next_sibling(c);
                if self.execute_qp(c)? {
                    self.state.remove(node, c);
                    self.emit(TraceEvent::Removed { node: c });
                }
                child = next;
            }
            if self.state.is_empty(node) {
                break true;
            }
        };
        drop(cursor);
        self.ctx.b.undo(mark);
        self.ctx.b.next_fresh = fresh;
        Ok(result)
    }

    /// Evaluates the examples at the given positions; returns the success
    /// flags of each.
    pub fn run_range(&mut self, range: Range<usize>) -> Result<Vec<Vec<bool>>, EvalError> {
        range.map(|i| self.evaluate_example(i)).collect()
    }

    /// Evaluates all examples in order.
    pub fn run(mut self) -> Result<(ResultSet, WorkCounters), EvalError> {
        let ids: Vec<u64> = self.db.examples.examples.iter().map(|e| e.id).collect();
        let mut rs = ResultSet::new(self.queries.len(), ids);
        for e in 0..rs.example_count() {
            let hits = self.evaluate_example(e)?;
            for (q, _) in hits.iter().enumerate().filter(|(_, &h)| h) {
                rs.set(q, e, true);
            }
        }
        Ok((rs, self.ctx.counters))
    }

    pub fn into_counters(self) -> WorkCounters {
        self.ctx.counters
    }
}

/// Evaluates the pack on every example of `db`, examples in the outer loop.
pub fn evaluate_pack_on_examples(pack: &QueryPack, db: &Database, key: &[Var], strategy: Strategy) -> Result<(ResultSet, WorkCounters), EvalError> {
    PackEvaluator::new(pack, db, key, strategy)?.run()
}

/// Like [`evaluate_pack_on_examples`], splitting the examples into contiguous
/// chunks evaluated on `workers` threads. Results and counters equal the
/// sequential run.
pub fn evaluate_pack_parallel(
    pack: &QueryPack,
    db: &Database,
    key: &[Var],
    strategy: Strategy,
    workers: usize,
) -> Result<(ResultSet, WorkCounters), EvalError> {
    let n = db.examples.len();
    let workers = workers.clamp(1, n.max(1));
    let chunk = n.div_ceil(workers).max(1);
    let ranges: Vec<Range<usize>> = (0..n).step_by(chunk).map(|s| s..(s + chunk).min(n)).collect();
    // Validate up front so that the zero-example case reports key errors too.
    PackEvaluator::new(pack, db, key, strategy)?;

    type Part = (Range<usize>, Vec<Vec<bool>>, WorkCounters);
    let parts: Vec<Result<Part, EvalError>> = std::thread::scope(|s| {
        let handles: Vec<_> = ranges
            .iter()
            .cloned()
            .map(|r| {
                s.spawn(move || {
                    let mut ev = PackEvaluator::new(pack, db, key, strategy)?;
                    let rows = ev.run_range(r.clone())?;
                    Ok((r, rows, ev.into_counters()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let ids: Vec<u64> = db.examples.examples.iter().map(|e| e.id).collect();
    let mut rs = ResultSet::new(pack.query_count, ids);
    let mut counters = PackEvaluator::new(pack, db, key, strategy)?.into_counters();
    for part in parts {
        let (r, rows, c) = part?;
        for (e, hits) in r.zip(rows) {
            for (q, _) in hits.iter().enumerate().filter(|(_, &h)| h) {
                rs.set(q, e, true);
            }
        }
        counters.merge(&c);
    }
    Ok((rs, counters))
}

/// Runs each query on its own until its first solution.
pub fn evaluate_separate(queries: &[Conjunction], example: Option<&Example>, db: &Database, key: &[Var]) -> Result<(Vec<bool>, WorkCounters), EvalError> {
    if queries.is_empty() {
        return Ok((Vec::new(), WorkCounters::with_layout(Strategy::Separate, Vec::new(), 0, 0)));
    }
    let pack = crate::packtree::build_pack(queries).expect("non-empty query list");
    evaluate_single(&pack, example, db, key, Strategy::Separate)
}

/// Runs each query of the pack through the pack walker without sharing.
pub fn evaluate_disjoint(pack: &QueryPack, example: Option<&Example>, db: &Database, key: &[Var]) -> Result<(Vec<bool>, WorkCounters), EvalError> {
    evaluate_single(pack, example, db, key, Strategy::Disjoint)
}

/// Packed evaluation of a pack on one example.
pub fn evaluate_packed(pack: &QueryPack, example: Option<&Example>, db: &Database, key: &[Var]) -> Result<(Vec<bool>, WorkCounters), EvalError> {
    evaluate_single(pack, example, db, key, Strategy::Packed)
}

fn evaluate_single(
    pack: &QueryPack,
    example: Option<&Example>,
    db: &Database,
    key: &[Var],
    strategy: Strategy,
) -> Result<(Vec<bool>, WorkCounters), EvalError> {
    let mut ev = PackEvaluator::new(pack, db, key, strategy)?;
    let hits = match example {
        Some(e) => ev.evaluate_on(Some(e), 0).map_err(|err| err.at_example(e.id))?,
        None => ev.evaluate_background()?,
    };
    Ok((hits, ev.into_counters()))
}
