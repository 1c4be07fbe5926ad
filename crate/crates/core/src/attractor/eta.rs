use rayon::prelude::*;

use super::dynamics::{advance, place, CycleDynamics, Place};
use super::{BoundReport, JobShard, RunConfig, SegmentSet};
use crate::renorm::ClassAMap;
use crate::rigor::round::{add_up, div_down, div_up, mul_down, mul_up, sub_up};
use crate::rigor::IInterval;

/// `M` equal pieces of `[lo, hi]` with shared float endpoints.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Partition {
    pub lo: f64,
    pub hi: f64,
    pub pieces: usize,
}

impl Partition {
    /// Pieces of the part of `T_1` certainly inside every admissible `T_1`.
    pub fn of_t1(dy: &CycleDynamics, pieces: usize) -> Self {
        let t = dy.t().lo();
        Partition { lo: -t, hi: t, pieces: pieces.max(1) }
    }

    fn endpoint(&self, k: usize) -> f64 {
        if k == 0 {
            self.lo
        } else if k == self.pieces {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * (k as f64 / self.pieces as f64)
        }
    }

    pub fn piece(&self, k: usize) -> IInterval {
        IInterval::raw(self.endpoint(k), self.endpoint(k + 1))
    }
}

/// How the orbit of a piece relates to the target `T_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum EtaOutcome {
    /// Some image lies inside `T_n`: the whole piece is in `X_n`.
    Hit,
    /// Escaped `T_1 ∪ J_1` with every image certainly disjoint from `T_n`.
    Miss,
    /// Budget used up without a decision.
    Exhausted,
    /// Straddles a boundary; bisection may help.
    Unresolved,
}

pub(crate) fn classify_eta(map: &ClassAMap, x: IInterval, inner: IInterval, outer: IInterval, budget: usize) -> EtaOutcome {
    let mut cur = x;
    let mut touched = false;
    for step in 0..=budget {
        if inner.contains_interval(&cur) {
            return EtaOutcome::Hit;
        }
        if cur.intersect(&outer).is_some() {
            touched = true;
        }
        match place(map, cur) {
            Place::Outside => return if touched { EtaOutcome::Unresolved } else { EtaOutcome::Miss },
            Place::Straddle => return EtaOutcome::Unresolved,
            Place::Inside(_) if step == budget => return EtaOutcome::Exhausted,
            Place::Inside(_) => match advance(map, cur) {
                Some(y) => cur = y,
                None => return EtaOutcome::Unresolved,
            },
        }
    }
    EtaOutcome::Exhausted
}

/// Pieces certainly in `X_n` and pieces possibly in `X_n`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EtaSets {
    pub lower: SegmentSet,
    pub upper: SegmentSet,
}

impl EtaSets {
    pub fn merge(parts: &[EtaSets]) -> EtaSets {
        EtaSets {
            lower: SegmentSet::union_all(parts.iter().map(|p| &p.lower)),
            upper: SegmentSet::union_all(parts.iter().map(|p| &p.upper)),
        }
    }
}

/// Bisects unresolved pieces up to `cap` times; pieces left unresolved or
/// exhausted count towards the upper set only.
pub(crate) fn refine_with(x: IInterval, cap: u32, classify: &impl Fn(IInterval) -> EtaOutcome) -> (Vec<IInterval>, Vec<IInterval>) {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut stack = vec![(x, 0u32)];
    while let Some((p, depth)) = stack.pop() {
        match classify(p) {
            EtaOutcome::Hit => {
                lower.push(p);
                upper.push(p);
            }
            EtaOutcome::Miss => {}
            EtaOutcome::Exhausted => upper.push(p),
            EtaOutcome::Unresolved if depth < cap && p.width() > 0.0 => {
                let (a, b) = p.split();
                stack.push((b, depth + 1));
                stack.push((a, depth + 1));
            }
            EtaOutcome::Unresolved => upper.push(p),
        }
    }
    (lower, upper)
}

/// Classifies the pieces of `shard` for level `n`.
pub fn eta_sets(dy: &CycleDynamics, n: usize, cfg: &RunConfig, shard: JobShard) -> EtaSets {
    let part = Partition::of_t1(dy, cfg.pieces);
    let (inner, outer) = (dy.t_inner(n), dy.t_outer(n));
    let map = dy.base();
    let found: Vec<(Vec<IInterval>, Vec<IInterval>)> = shard
        .range(part.pieces)
        .into_par_iter()
        .map(|k| refine_with(part.piece(k), cfg.refine_eta, &|p| classify_eta(map, p, inner, outer, cfg.eta_budget)))
        .collect();
    EtaSets {
        lower: SegmentSet::from_segments(found.iter().flat_map(|f| f.0.iter().copied())),
        upper: SegmentSet::from_segments(found.iter().flat_map(|f| f.1.iter().copied())),
    }
}

/// Converts piece sets into `eta_lo = |lower| / |T_1|` and
/// `eta_hi = (|upper| + |T_1 outer \ T_1 inner|) / |T_1|`.
pub fn eta_report(dy: &CycleDynamics, n: usize, cfg: &RunConfig, sets: &EtaSets) -> BoundReport {
    eta_from_measures(dy, n, cfg, sets.lower.measure_lo(), sets.upper.measure_hi())
}

/// Same as [`eta_report`] from a lower bound on `|lower|` and an upper bound
/// on `|upper|`, e.g. sums over shards.
pub fn eta_from_measures(dy: &CycleDynamics, n: usize, cfg: &RunConfig, lower: f64, upper: f64) -> BoundReport {
    let mut r = BoundReport::new(dy.d(), n);
    r.parameters = cfg.to_params();
    if n <= 1 {
        r.eta_lo = 1.0;
        r.eta_hi = 1.0;
        return r;
    }
    let t = dy.t();
    let sliver = mul_up(2.0, sub_up(t.hi(), t.lo()));
    r.eta_lo = div_down(lower, mul_up(2.0, t.hi())).min(1.0);
    r.eta_hi = div_up(add_up(upper, sliver), mul_down(2.0, t.lo())).min(1.0);
    r
}

/// Rigorous `eta_n <= eta_hi`: only pieces certified to escape while
/// avoiding `T_n` are excluded.
pub fn eta_upper(dy: &CycleDynamics, n: usize, cfg: &RunConfig) -> BoundReport {
    let mut r = eta_both(dy, n, cfg);
    r.eta_lo = if n <= 1 { 1.0 } else { 0.0 };
    r
}

/// Rigorous `eta_n >= eta_lo`: pieces with an image certified inside `T_n`.
pub fn eta_lower(dy: &CycleDynamics, n: usize, cfg: &RunConfig) -> BoundReport {
    let mut r = eta_both(dy, n, cfg);
    r.eta_hi = 1.0;
    r
}

/// Both `eta` bounds from one pass over the partition.
pub fn eta_both(dy: &CycleDynamics, n: usize, cfg: &RunConfig) -> BoundReport {
    if n <= 1 {
        return eta_report(dy, n, cfg, &EtaSets::default());
    }
    let sets = eta_sets(dy, n, cfg, JobShard::WHOLE);
    eta_report(dy, n, cfg, &sets)
}
