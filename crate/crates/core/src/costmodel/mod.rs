//! Predicted speedup of packed over separate execution, and checks of those
//! predictions against measured work.
//!
//! One-level packs: `n` queries share a prefix. With `t[i]` the work query `i`
//! spends in the prefix and `t'[i]` the work in its own suffix,
//!
//! ```text
//! Ts = sum(t) + sum(t')          Tp = max(t) + sum(t')
//! c  = sum(t) / sum(t')          K  = max(t) / mean(t)
//! Ts / Tp = (c + 1) / (K c / n + 1),   1 <= Ts / Tp <= min(c + 1, n)
//! ```
//!
//! Multi-level packs with branching `b`, depth `d` and mean per-query work
//! `tbar[l]` at level `l`:
//!
//! ```text
//! Tp = sum_l b^l K_l tbar[l]      (K_l = 1 unless measured; K_d = 1)
//! Ts = b^d sum_l tbar[l]
//! R(l, m) = sum_{k=l..m} b^m tbar[k] / sum_{k=l..m} b^k tbar[k]
//! c_l     = sum_{k<=l} b^k tbar[k] / sum_{k>l} b^k tbar[k]
//! Ts / Tp = (b^(d-l) c_l R(0, l) + R(l+1, d)) / (c_l + 1)   for every l < d
//! ```

use serde::Serialize;

use crate::engine::{Strategy, WorkCounters};
use crate::packtree::{PackNode, QueryPack};

/// Relative slack on bound checks, covering bookkeeping the model ignores.
pub const EPSILON: f64 = 0.05;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CostError {
    #[error("t has {t} entries but t' has {t_prime}")]
    LengthMismatch { t: usize, t_prime: usize },
    #[error("expected {expected} per-level values, got {found}")]
    LevelCount { expected: usize, found: usize },
    #[error("work values must be finite and non-negative")]
    NegativeWork,
    #[error("branching factor must be at least 1")]
    ZeroBranching,
    #[error("counters come from a {0} run; packed or disjoint counters are needed")]
    WrongStrategy(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneLevelParams {
    pub t: Vec<f64>,
    pub t_prime: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiLevelParams {
    pub b: usize,
    pub d: usize,
    pub tbar: Vec<f64>,
    /// Max/mean ratios for levels `0..d`.
    pub k: Option<Vec<f64>>,
    /// Set when the pack the values were fitted on is not a complete
    /// `b`-ary tree of depth `d`.
    pub non_uniform: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SpeedupReport {
    pub ts: f64,
    pub tp: f64,
    pub speedup: f64,
    /// One-level shared/private ratio.
    pub c: Option<f64>,
    /// One-level max/mean ratio of shared work.
    pub k: Option<f64>,
    /// `c_l` for `l = 0..d-1`; `None` where the denominator vanishes.
    pub c_levels: Vec<Option<f64>>,
    /// `r_table[l][m - l]` holds `R(l, m)`.
    pub r_table: Vec<Vec<Option<f64>>>,
    /// Right-hand side of the per-level identity, for `l = 0..d-1`.
    pub level_bounds: Vec<Option<f64>>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Notes on skipped or undefined terms.
    pub degenerate: Vec<String>,
}

fn check_work(values: &[f64]) -> Result<(), CostError> {
    if values.iter().all(|v| v.is_finite() && *v >= 0.0) {
        Ok(())
    } else {
        Err(CostError::NegativeWork)
    }
}

pub fn one_level(p: &OneLevelParams) -> Result<SpeedupReport, CostError> {
    if p.t.len() != p.t_prime.len() {
        return Err(CostError::LengthMismatch {
            t: p.t.len(),
            t_prime: p.t_prime.len(),
        });
    }
    check_work(&p.t)?;
    check_work(&p.t_prime)?;
    let n = p.t.len() as f64;
    let st: f64 = p.t.iter().sum();
    let stp: f64 = p.t_prime.iter().sum();
    let max_t = p.t.iter().copied().fold(0.0, f64::max);
    let ts = st + stp;
    let tp = max_t + stp;
    let mut r = SpeedupReport {
        ts,
        tp,
        ..Default::default()
    };
    if stp == 0.0 {
        r.speedup = if tp > 0.0 { ts / tp } else { 1.0 };
        r.degenerate.push("no private work: c is undefined".into());
        return Ok(r);
    }
    let c = st / stp;
    // With no shared work every t_i equals the mean.
    let k = if st > 0.0 { max_t / (st / n) } else { 1.0 };
    r.c = Some(c);
    r.k = Some(k);
    r.speedup = (c + 1.0) / (k / n * c + 1.0);
    r.lower = Some(1.0);
    r.upper = Some((c + 1.0).min(n));
    Ok(r)
}

fn pow(b: usize, e: usize) -> f64 {
    (b as f64).powi(e as i32)
}

/// `R(l, m)`, or `None` when its denominator is zero.
pub fn r_coefficient(b: usize, tbar: &[f64], l: usize, m: usize) -> Option<f64> {
    let num: f64 = (l..=m).map(|k| pow(b, m) * tbar[k]).sum();
    let den: f64 = (l..=m).map(|k| pow(b, k) * tbar[k]).sum();
    (den > 0.0).then(|| num / den)
}

/// `c_l`, or `None` when its denominator is zero.
pub fn c_level(b: usize, tbar: &[f64], l: usize) -> Option<f64> {
    let d = tbar.len() - 1;
    let num: f64 = (0..=l).map(|k| pow(b, k) * tbar[k]).sum();
    let den: f64 = (l + 1..=d).map(|k| pow(b, k) * tbar[k]).sum();
    (den > 0.0).then(|| num / den)
}

pub fn multi_level(p: &MultiLevelParams) -> Result<SpeedupReport, CostError> {
    if p.b == 0 {
        return Err(CostError::ZeroBranching);
    }
    if p.tbar.len() != p.d + 1 {
        return Err(CostError::LevelCount {
            expected: p.d + 1,
            found: p.tbar.len(),
        });
    }
    check_work(&p.tbar)?;
    if let Some(k) = &p.k {
        if k.len() != p.d {
            return Err(CostError::LevelCount {
                expected: p.d,
                found: k.len(),
            });
        }
        check_work(k)?;
    }
    let (b, d, tbar) = (p.b, p.d, &p.tbar);
    let kl = |l: usize| p.k.as_ref().and_then(|k| k.get(l)).copied().unwrap_or(1.0);
    let tp: f64 = (0..=d).map(|l| pow(b, l) * kl(l) * tbar[l]).sum();
    let ts: f64 = pow(b, d) * tbar.iter().sum::<f64>();
    let mut r = SpeedupReport {
        ts,
        tp,
        speedup: if tp > 0.0 { ts / tp } else { 1.0 },
        upper: Some(pow(b, d)),
        ..Default::default()
    };
    r.r_table = (0..=d).map(|l| (l..=d).map(|m| r_coefficient(b, tbar, l, m)).collect()).collect();
    for l in 0..d {
        let c = c_level(b, tbar, l);
        r.c_levels.push(c);
        let bound = match (c, r_coefficient(b, tbar, 0, l), r_coefficient(b, tbar, l + 1, d)) {
            (Some(c), Some(r0), Some(r1)) => Some((pow(b, d - l) * c * r0 + r1) / (c + 1.0)),
            (Some(0.0), None, Some(r1)) => Some(r1),
            _ => None,
        };
        if bound.is_none() {
            r.degenerate.push(format!("level {} skipped: a denominator is zero", l));
        }
        r.level_bounds.push(bound);
    }
    r.lower = r.level_bounds.iter().flatten().copied().reduce(f64::max).or(Some(1.0));
    Ok(r)
}

/// Queries (by id) below a node, with the node's depth.
fn groups<'p>(n: &'p PackNode, depth: usize, out: &mut Vec<(usize, &'p PackNode, Vec<usize>)>) -> Vec<usize> {
    let mut ids: Vec<usize> = n.leaf.into_iter().collect();
    for c in &n.children {
        ids.extend(groups(c, depth + 1, out));
    }
    out.push((depth, n, ids.clone()));
    ids
}

/// Per-level work parameters of a pack, measured by a packed or disjoint run.
///
/// Disjoint counters give the per-query mean work at each level and the
/// max/mean ratios `K_l`, taken per node over the queries below it. Packed
/// counters give the mean work per node at each level.
pub fn fit_from_counters(counters: &WorkCounters, pack: &QueryPack) -> Result<MultiLevelParams, CostError> {
    let d = pack.depth;
    let b = pack.max_branching;
    let mut nodes = Vec::new();
    groups(&pack.root, 0, &mut nodes);
    let non_uniform = nodes
        .iter()
        .any(|(depth, n, _)| if n.is_leaf() { *depth != d } else { n.children.len() != b });

    match counters.strategy {
        Some(Strategy::Disjoint) => {
            let n = counters.query_level_work.len().max(1) as f64;
            let mut tbar = vec![0.0; d + 1];
            for q in &counters.query_level_work {
                for (l, &w) in q.iter().enumerate().take(d + 1) {
                    tbar[l] += w as f64 / n;
                }
            }
            let mut k = vec![1.0f64; d];
            for (depth, _, ids) in &nodes {
                if *depth >= d || ids.is_empty() {
                    continue;
                }
                let vals: Vec<f64> = ids.iter().map(|&i| counters.query_level_work[i][*depth] as f64).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                if mean > 0.0 {
                    let max = vals.iter().copied().fold(0.0, f64::max);
                    k[*depth] = k[*depth].max(max / mean);
                }
            }
            Ok(MultiLevelParams {
                b,
                d,
                tbar,
                k: Some(k),
                non_uniform,
            })
        }
        Some(Strategy::Packed) => {
            let work = counters.level_work();
            let mut count = vec![0usize; d + 1];
            for &depth in &counters.node_depth {
                count[depth] += 1;
            }
            let tbar = (0..=d)
                .map(|l| if count[l] > 0 { work.get(l).copied().unwrap_or(0) as f64 / count[l] as f64 } else { 0.0 })
                .collect();
            Ok(MultiLevelParams {
                b,
                d,
                tbar,
                k: None,
                non_uniform,
            })
        }
        other => Err(CostError::WrongStrategy(other.map_or("unknown", Strategy::name).to_string())),
    }
}

/// Shared and private work of each query of a one-level pack, from
/// disjoint-run counters. Work below level 0 counts as private.
pub fn one_level_from_counters(disjoint: &WorkCounters) -> Result<OneLevelParams, CostError> {
    if disjoint.strategy != Some(Strategy::Disjoint) {
        return Err(CostError::WrongStrategy(disjoint.strategy.map_or("unknown", Strategy::name).to_string()));
    }
    let t = disjoint.query_level_work.iter().map(|q| q.first().copied().unwrap_or(0) as f64).collect();
    let t_prime = disjoint
        .query_level_work
        .iter()
        .map(|q| q.iter().skip(1).sum::<u64>() as f64)
        .collect();
    Ok(OneLevelParams { t, t_prime })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub measured: f64,
    pub lower: f64,
    pub upper: Option<f64>,
    pub diagnostics: Vec<String>,
}

/// Checks a measured speedup `ts / tp` against `[1, upper]` with
/// [`EPSILON`] slack on both sides.
pub fn validate_bounds(ts: f64, tp: f64, predicted: &SpeedupReport) -> Verdict {
    let mut diagnostics = Vec::new();
    let measured = if tp > 0.0 { ts / tp } else { 1.0 };
    if tp > ts {
        diagnostics.push(format!("packed work {} exceeds unshared work {}", tp, ts));
    }
    if measured < 1.0 - EPSILON {
        diagnostics.push(format!("speedup {:.4} below the lower bound 1", measured));
    }
    if let Some(u) = predicted.upper {
        if measured > u * (1.0 + EPSILON) {
            diagnostics.push(format!("speedup {:.4} above the upper bound {:.4}", measured, u));
        }
    }
    Verdict {
        pass: diagnostics.is_empty(),
        measured,
        lower: 1.0,
        upper: predicted.upper,
        diagnostics,
    }
}

#[cfg(test)]
mod tests;
