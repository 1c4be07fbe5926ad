use rayon::prelude::*;

use super::dynamics::{advance, place, CycleDynamics, Place};
use super::eta::Partition;
use super::{BoundReport, JobShard, RunConfig, SegmentSet};
use crate::funcspace::{solve_inverse, AffineMap, FuncEnclosure, Orientation};
use crate::renorm::{ClassAMap, CycleMember};
use crate::rigor::round::{div_down, mul_up, sub_up};
use crate::rigor::{root_real, scope_result, IInterval};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ZetaOutcome {
    Counted,
    Rejected,
    AmbiguousReturn,
    AmbiguousEscape,
}

/// Two-stage escape test for a piece `x ⊆ T_1` in level-one coordinates.
///
/// Stage one iterates `B_{n-1}` until the image is certainly outside
/// `T_1 ∪ J_1` (optionally staying clear of `avoid`). Stage two rescales to
/// `K_n = c_{n-1} K` and iterates `F` until the image is certainly outside
/// `T_1 ∪ J_1`, every image certainly disjoint from `T_n`.
pub(crate) fn classify_zeta(dy: &CycleDynamics, n: usize, x: IInterval, cfg: &RunConfig, avoid: Option<(IInterval, IInterval)>) -> ZetaOutcome {
    let b = dy.member(n - 1);
    let mut cur = x;
    let mut escaped = false;
    for step in 0..=cfg.return_budget {
        if let Some((inner, outer)) = avoid {
            if inner.contains_interval(&cur) {
                return ZetaOutcome::Rejected;
            }
            if cur.intersect(&outer).is_some() {
                return ZetaOutcome::AmbiguousReturn;
            }
        }
        match place(b, cur) {
            Place::Outside => {
                escaped = true;
                break;
            }
            Place::Straddle => return ZetaOutcome::AmbiguousReturn,
            Place::Inside(_) if step == cfg.return_budget => return ZetaOutcome::Rejected,
            Place::Inside(_) => match advance(b, cur) {
                Some(y) => cur = y,
                None => return ZetaOutcome::AmbiguousReturn,
            },
        }
    }
    if !escaped {
        return ZetaOutcome::Rejected;
    }
    if n == 1 {
        return ZetaOutcome::Counted;
    }
    let f = dy.base();
    let (tn_inner, tn_outer) = (dy.t_inner(n), dy.t_outer(n));
    let mut k = dy.scale(n - 1) * cur;
    for step in 0..=cfg.escape_budget {
        if tn_inner.contains_interval(&k) {
            return ZetaOutcome::Rejected;
        }
        if k.intersect(&tn_outer).is_some() {
            return ZetaOutcome::AmbiguousEscape;
        }
        match place(f, k) {
            Place::Outside => return ZetaOutcome::Counted,
            Place::Straddle => return ZetaOutcome::AmbiguousEscape,
            Place::Inside(_) if step == cfg.escape_budget => return ZetaOutcome::Rejected,
            Place::Inside(_) => match advance(f, k) {
                Some(y) => k = y,
                None => return ZetaOutcome::AmbiguousEscape,
            },
        }
    }
    ZetaOutcome::Rejected
}

/// Bisects ambiguous pieces up to the stage caps; only `Counted` pieces are kept.
pub(crate) fn refine_zeta_with(x: IInterval, caps: (u32, u32), classify: &impl Fn(IInterval) -> ZetaOutcome) -> Vec<IInterval> {
    let mut out = Vec::new();
    let mut stack = vec![(x, 0u32)];
    while let Some((p, depth)) = stack.pop() {
        let cap = match classify(p) {
            ZetaOutcome::Counted => {
                out.push(p);
                continue;
            }
            ZetaOutcome::Rejected => continue,
            ZetaOutcome::AmbiguousReturn => caps.0,
            ZetaOutcome::AmbiguousEscape => caps.1,
        };
        if depth < cap && p.width() > 0.0 {
            let (a, b) = p.split();
            stack.push((b, depth + 1));
            stack.push((a, depth + 1));
        }
    }
    out
}

/// Pieces of `T_1` (level-one coordinates) certified to lie in `Z_n`, or in
/// `Z_{n,m}` when `m` is given (stage one then also avoids `T_{m+1}`).
pub fn zeta_lower_set(dy: &CycleDynamics, n: usize, m: Option<usize>, cfg: &RunConfig, shard: JobShard) -> SegmentSet {
    let part = Partition::of_t1(dy, cfg.pieces);
    let avoid = m.map(|m| (dy.t_inner(m + 1), dy.t_outer(m + 1)));
    let found: Vec<Vec<IInterval>> = shard
        .range(part.pieces)
        .into_par_iter()
        .map(|k| refine_zeta_with(part.piece(k), (cfg.refine_return, cfg.refine_escape), &|p| classify_zeta(dy, n, p, cfg, avoid)))
        .collect();
    SegmentSet::from_segments(found.into_iter().flatten())
}

/// `zeta_lo = |counted| / |T_1|`.
pub fn zeta_lower_report(dy: &CycleDynamics, n: usize, cfg: &RunConfig, counted: &SegmentSet) -> BoundReport {
    zeta_lower_from_measure(dy, n, cfg, counted.measure_lo())
}

/// Same as [`zeta_lower_report`] from a lower bound on the counted measure.
pub fn zeta_lower_from_measure(dy: &CycleDynamics, n: usize, cfg: &RunConfig, counted: f64) -> BoundReport {
    let mut r = BoundReport::new(dy.d(), n);
    r.parameters = cfg.to_params();
    r.zeta_lo = div_down(counted, mul_up(2.0, dy.t().hi())).min(1.0);
    r
}

/// Rigorous lower bound on `zeta_n` by the two-stage escape test.
pub fn zeta_lower(dy: &CycleDynamics, n: usize, cfg: &RunConfig) -> BoundReport {
    let counted = zeta_lower_set(dy, n, None, cfg, JobShard::WHOLE);
    zeta_lower_report(dy, n, cfg, &counted)
}

/// Rigorous lower bound on `zeta_{n,m}`.
pub fn zeta_nm_lower(dy: &CycleDynamics, n: usize, m: usize, cfg: &RunConfig) -> BoundReport {
    let counted = zeta_lower_set(dy, n, Some(m), cfg, JobShard::WHOLE);
    let mut r = zeta_lower_report(dy, n, cfg, &counted);
    r.parameters.insert("m".into(), m.to_string());
    r
}

/// Margin kept from `±1` when inverting the branch diffeomorphisms, so the
/// certified Newton balls stay inside their domain.
const EDGE: f64 = 1e-9;

fn inverse(f: &FuncEnclosure, y: f64, guess: f64) -> Option<IInterval> {
    solve_inverse(f, IInterval::point(y), guess.clamp(-1.0 + EDGE, 1.0 - EDGE)).ok()
}

/// Float guess for `f^{-1}(y)` by linear interpolation between `f(±1)`.
fn guess(lo: f64, hi: f64, y: f64) -> f64 {
    (-1.0 + 2.0 * (y - lo) / (hi - lo)).clamp(-1.0, 1.0)
}

/// Certified inner enclosures of the components of `map^{-1}(s)`: points
/// that lie in the preimage for every map in the enclosure.
pub fn preimages(map: &ClassAMap, s: IInterval) -> Vec<IInterval> {
    let mut out = Vec::with_capacity(3);
    if let Some(c) = j_preimage(map, s) {
        out.push(c);
    }
    out.extend(t_preimages(map, s));
    out
}

fn eval_point(f: &FuncEnclosure, x: f64) -> Option<IInterval> {
    f.eval(IInterval::point(x)).ok()
}

fn j_preimage(map: &ClassAMap, s: IInterval) -> Option<IInterval> {
    let psi = &map.elem.psi;
    let lo_end = eval_point(psi, -1.0 + EDGE)?;
    let hi_end = eval_point(psi, 1.0 - EDGE)?;
    let target = match map.member {
        CycleMember::F => s,
        CycleMember::G => -s,
    };
    let a = target.intersect(&IInterval::new(lo_end.hi(), hi_end.lo()).ok()?)?;
    if a.width() <= 0.0 {
        return None;
    }
    let (l, h) = (lo_end.midpoint(), hi_end.midpoint());
    let u1 = inverse(psi, a.lo(), guess(l, h, a.lo()))?;
    let u2 = inverse(psi, a.hi(), guess(l, h, a.hi()))?;
    let sj = AffineMap::new(map.elem.i, map.elem.j, Orientation::Preserving).ok()?;
    let x1 = scope_result(|| Ok::<_, crate::rigor::RigorError>(sj.from_unit(u1))).ok()?;
    let x2 = scope_result(|| Ok::<_, crate::rigor::RigorError>(sj.from_unit(u2))).ok()?;
    IInterval::new(x1.hi(), x2.lo()).ok().filter(|c| c.width() > 0.0)
}

/// `|x|` with `F(x) = y` on `T`, as an enclosure: `t ((phi^{-1}(y) - v)/(1 - v))^{1/d}`.
fn t_radius(map: &ClassAMap, y: f64, range: (f64, f64)) -> Option<IInterval> {
    let e = &map.elem;
    let u = inverse(&e.phi, y, guess(range.0, range.1, y))?;
    scope_result(|| {
        let w = ((u - e.v) / (IInterval::ONE - e.v)).intersect(&IInterval::new(0.0, 1.0)?);
        let Some(w) = w else { return Ok(None) };
        Ok::<_, crate::rigor::RigorError>(Some(e.t * root_real(w, e.d)?))
    })
    .ok()
    .flatten()
}

fn t_preimages(map: &ClassAMap, s: IInterval) -> Vec<IInterval> {
    let phi = &map.elem.phi;
    let cv = map.critical_value();
    let (Some(lo_end), Some(top)) = (eval_point(phi, -1.0), eval_point(phi, 1.0 - EDGE)) else { return Vec::new() };
    let range = (lo_end.midpoint(), top.midpoint());
    let y2 = s.hi().min(top.lo());
    if y2 <= cv.hi() {
        return Vec::new();
    }
    let Some(r2) = t_radius(map, y2, range) else { return Vec::new() };
    let outer = r2.lo();
    if s.lo() <= cv.lo() {
        return IInterval::new(-outer, outer).ok().filter(|c| c.width() > 0.0).into_iter().collect();
    }
    let y1 = s.lo().max(cv.hi());
    let Some(r1) = t_radius(map, y1, range) else { return Vec::new() };
    let inner = r1.hi();
    if !(inner < outer) {
        return Vec::new();
    }
    vec![IInterval::raw(-outer, -inner), IInterval::raw(inner, outer)]
}

/// Preimage-tree roots: the nodes at depth `min(depth, 2)`; shards split this list.
fn tree_roots(map: &ClassAMap, root: IInterval, depth: usize) -> Vec<(IInterval, usize)> {
    let mut level = vec![(root, 0usize)];
    for _ in 0..depth.min(2) {
        let mut next = Vec::new();
        for (s, d) in &level {
            for p in preimages(map, *s) {
                next.push((p, d + 1));
            }
        }
        level = next;
    }
    level
}

fn grow(map: &ClassAMap, s: IInterval, depth: usize, max_depth: usize, out: &mut Vec<IInterval>) {
    if depth > 0 {
        out.push(s);
    }
    if depth == max_depth {
        return;
    }
    for p in preimages(map, s) {
        grow(map, p, depth + 1, max_depth, out);
    }
}

/// Components of `map^{-k}(s)` for `k = 1..=depth`, one vector per level.
pub fn preimage_levels(map: &ClassAMap, s: IInterval, depth: usize) -> Vec<Vec<IInterval>> {
    let mut levels: Vec<Vec<IInterval>> = Vec::with_capacity(depth);
    let mut level = vec![s];
    for _ in 0..depth {
        level = level.iter().flat_map(|x| preimages(map, *x)).collect();
        levels.push(level.clone());
    }
    levels
}

/// All components of `map^{-k}(s)`, `1 <= k <= depth`, depth first.
pub fn preimage_tree(map: &ClassAMap, s: IInterval, depth: usize) -> Vec<IInterval> {
    let mut out = Vec::new();
    grow(map, s, 0, depth, &mut out);
    out
}

/// Components of `F^{-l}(T_n)`, `1 <= l <= depth`, in level-zero coordinates.
/// Shallow nodes (depth < 2) are produced by shard 0 only.
pub fn preimage_stage(dy: &CycleDynamics, n: usize, depth: usize, shard: JobShard) -> Vec<IInterval> {
    let map = dy.base();
    let roots = tree_roots(map, dy.t_inner(n), depth);
    let mut out = Vec::new();
    if shard.index == 0 && depth > 0 {
        let mut shallow = Vec::new();
        let mut level = vec![dy.t_inner(n)];
        for _ in 0..depth.min(2).saturating_sub(1) {
            level = level.iter().flat_map(|s| preimages(map, *s)).collect();
            shallow.extend(level.iter().copied());
        }
        out.extend(shallow);
    }
    let parts: Vec<Vec<IInterval>> = roots[shard.range(roots.len())]
        .par_iter()
        .map(|(s, d)| {
            let mut v = Vec::new();
            grow(map, *s, *d, depth, &mut v);
            v
        })
        .collect();
    out.extend(parts.into_iter().flatten());
    out
}

/// Union of the preimage components, restricted to `T_{n-1} \ (T_n ∪ J_n)`
/// and rescaled to level-one coordinates by `1 / c_{n-1}`.
pub fn reduce_stage(dy: &CycleDynamics, n: usize, components: &[IInterval]) -> SegmentSet {
    let union = SegmentSet::from_segments(components.iter().copied());
    let kept = union
        .intersect_interval(&dy.t_inner(n - 1))
        .subtract_interval(&dy.t_outer(n))
        .subtract_interval(&dy.j_outer(n));
    let c = dy.scale(n - 1);
    SegmentSet::from_segments(kept.segments().iter().filter_map(|w| inner_scale(*w, c)))
}

/// Points certainly in `w / c` for every admissible `c`.
fn inner_scale(w: IInterval, c: IInterval) -> Option<IInterval> {
    let a = IInterval::point(w.lo()) / c;
    let b = IInterval::point(w.hi()) / c;
    let (l, h) = if a.midpoint() <= b.midpoint() { (a, b) } else { (b, a) };
    IInterval::new(l.hi(), h.lo()).ok().filter(|s| s.width() > 0.0)
}

fn pull_back(map: &ClassAMap, t1: IInterval, s: IInterval, depth: usize, max_depth: usize, out: &mut Vec<IInterval>) {
    if depth == max_depth {
        return;
    }
    for p in preimages(map, s) {
        if t1.contains_interval(&p) {
            out.push(p);
        }
        pull_back(map, t1, p, depth + 1, max_depth, out);
    }
}

/// Pull-backs of the reduced set under `B_{n-1}` to depth `k_ret`, kept where
/// certainly inside `T_1` (level-one coordinates of `T_n`).
pub fn return_stage(dy: &CycleDynamics, n: usize, reduced: &SegmentSet, k_ret: usize, shard: JobShard) -> SegmentSet {
    let map = dy.member(n - 1);
    let t1 = dy.t_inner(1);
    let segs = reduced.segments();
    let parts: Vec<Vec<IInterval>> = segs[shard.range(segs.len())]
        .par_iter()
        .map(|w| {
            let mut v = Vec::new();
            pull_back(map, t1, *w, 0, k_ret, &mut v);
            v
        })
        .collect();
    SegmentSet::from_segments(parts.into_iter().flatten())
}

/// `zeta_hi = 1 - |returning| / |T_1|`.
pub fn zeta_upper_report(dy: &CycleDynamics, n: usize, cfg: &RunConfig, returning: &SegmentSet) -> BoundReport {
    let mut r = BoundReport::new(dy.d(), n);
    r.parameters = cfg.to_params();
    let frac = div_down(returning.measure_lo(), mul_up(2.0, dy.t().hi()));
    r.zeta_hi = sub_up(1.0, frac).clamp(0.0, 1.0);
    r
}

/// Rigorous upper bound on `zeta_n` from certified returning components.
pub fn zeta_upper(dy: &CycleDynamics, n: usize, cfg: &RunConfig) -> BoundReport {
    let comps = preimage_stage(dy, n, cfg.preimage_depth, JobShard::WHOLE);
    let reduced = reduce_stage(dy, n, &comps);
    let returning = return_stage(dy, n, &reduced, cfg.return_depth, JobShard::WHOLE);
    zeta_upper_report(dy, n, cfg, &returning)
}
