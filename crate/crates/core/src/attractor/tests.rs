use proptest::prelude::*;

use super::dynamics::{place, Place};
use super::eta::{classify_eta, refine_with, EtaOutcome, Partition};
use super::zeta::{classify_zeta, refine_zeta_with, ZetaOutcome};
use super::*;
use crate::renorm::{Branch, CycleMember, RenormElement};
use crate::rigor::IInterval;
use crate::testutil::fixed;

/// Float model of the cycle built from coefficient midpoints.
struct Model {
    d: f64,
    v: f64,
    i: f64,
    j: f64,
    t: f64,
    psi: Vec<f64>,
    phi: Vec<f64>,
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

impl Model {
    fn new(e: &RenormElement) -> Self {
        Model {
            d: e.d,
            v: e.v.midpoint(),
            i: e.i.midpoint(),
            j: e.j.midpoint(),
            t: e.t.midpoint(),
            psi: e.psi.midpoints(),
            phi: e.phi.midpoints(),
        }
    }

    /// `B(x)` for the cycle member `m`; `None` outside `T_1 ∪ J_1`.
    fn map(&self, m: CycleMember, x: f64) -> Option<f64> {
        if x.abs() <= self.t {
            let p = self.v + (1.0 - self.v) * (x.abs() / self.t).powf(self.d);
            Some(horner(&self.phi, p))
        } else if (self.i..=self.j).contains(&x) {
            let u = 2.0 * (x - self.i) / (self.j - self.i) - 1.0;
            Some(m.sign() * horner(&self.psi, u))
        } else {
            None
        }
    }

    fn c(&self, k: usize) -> f64 {
        let s = if k % 4 < 2 { 1.0 } else { -1.0 };
        s * self.t.powi(k as i32)
    }

    fn in_t(&self, n: usize, x: f64) -> bool {
        x.abs() <= self.t.powi(n as i32)
    }

    fn in_j(&self, n: usize, x: f64) -> bool {
        let (a, b) = (self.c(n - 1) * self.i, self.c(n - 1) * self.j);
        x >= a.min(b) && x <= a.max(b)
    }

    /// `F_k` from its recursive definition: `F_{k-1}` on `J_{k+1}`,
    /// `F_{k-1} ∘ F_{k-1}` on `T_{k+1}`.
    fn first_return(&self, k: usize, x: f64) -> Option<f64> {
        if k == 0 {
            return self.map(CycleMember::F, x);
        }
        if self.in_j(k + 1, x) {
            self.first_return(k - 1, x)
        } else if self.in_t(k + 1, x) {
            let y = self.first_return(k - 1, x)?;
            self.first_return(k - 1, y)
        } else {
            None
        }
    }
}

fn dynamics(d: f64) -> CycleDynamics {
    CycleDynamics::new(fixed(d), 24).unwrap()
}

fn small(pieces: usize, budget: usize) -> RunConfig {
    RunConfig {
        pieces,
        eta_budget: budget,
        return_budget: budget,
        escape_budget: budget,
        preimage_depth: 6,
        return_depth: 4,
        ..RunConfig::DESK
    }
}

fn tiny(x: f64) -> IInterval {
    IInterval::new(x - 1e-13, x + 1e-13).unwrap()
}

#[test]
fn critical_point_maps_to_critical_value() {
    for d in [3.8, 5.1] {
        let dy = dynamics(d);
        let m = Model::new(fixed(d));
        let o = iterate_map(dy.base(), IInterval::point(0.0), 1);
        assert_eq!(o.points.len(), 2);
        assert_eq!(o.branches, vec![Branch::T]);
        let x1 = o.points[1];
        assert!(x1.width() < 1e-9);
        assert!((x1.midpoint() - horner(&m.phi, m.v)).abs() < 1e-9);
        assert!(x1.intersect(&fixed(d).critical_value().unwrap()).is_some());
    }
}

#[test]
fn zero_steps_is_exhausted() {
    let dy = dynamics(5.1);
    let x = IInterval::new(0.1, 0.2).unwrap();
    let o = iterate_map(dy.base(), x, 0);
    assert_eq!(o.points, vec![x]);
    assert!(o.branches.is_empty());
    assert_eq!(o.status, Status::Exhausted);
}

#[test]
fn escaping_point_found_by_simulation_escapes() {
    let dy = dynamics(3.8);
    let m = Model::new(fixed(3.8));
    let margin = 1e-6;
    let mut found = None;
    'search: for k in 1..2000 {
        let x0 = -m.t + 2.0 * m.t * k as f64 / 2000.0;
        let mut x = x0;
        for step in 0..30 {
            let near_edge = [m.t, -m.t, m.i, m.j].iter().any(|e| (x - e).abs() < margin);
            if near_edge {
                continue 'search;
            }
            match m.map(CycleMember::F, x) {
                Some(y) => x = y,
                None => {
                    found = Some((x0, step));
                    break 'search;
                }
            }
        }
    }
    let (x0, steps) = found.expect("some sample escapes within 30 steps");
    let o = iterate_map(dy.base(), IInterval::point(x0), 40);
    assert_eq!(o.status, Status::Escaped);
    assert_eq!(o.points.len(), steps + 1);
}

#[test]
fn interval_orbits_enclose_float_orbits() {
    for d in [3.8, 5.1] {
        let dy = dynamics(d);
        let m = Model::new(fixed(d));
        for k in 0..200 {
            let x0 = -m.t + 2.0 * m.t * (k as f64 + 0.37) / 200.0;
            let o = iterate_map(dy.base(), IInterval::point(x0), 12);
            let mut x = x0;
            for p in &o.points[1..] {
                x = m.map(CycleMember::F, x).unwrap();
                assert!(p.inflate(1e-9).contains(x), "d={d} x0={x0} {p:?} vs {x}");
            }
        }
    }
}

#[test]
fn level_one_first_return_is_plain_iteration() {
    let dy = dynamics(5.1);
    for x in [IInterval::new(0.01, 0.02).unwrap(), IInterval::point(-0.3), IInterval::point(0.0)] {
        let a = first_return_iterate(&dy, 1, x, 25).unwrap();
        let b = iterate_map(dy.base(), x, 25);
        assert_eq!(a, b);
    }
    assert!(matches!(first_return_iterate(&dy, 0, IInterval::point(0.0), 1), Err(AttractorError::BadLevel { .. })));
}

#[test]
fn first_return_matches_recursive_definition() {
    for d in [3.8, 5.1] {
        let dy = dynamics(d);
        let m = Model::new(fixed(d));
        for n in 2..=4 {
            let h = m.t.powi(n as i32);
            for k in 0..40 {
                let x = -h + 2.0 * h * (k as f64 + 0.5) / 40.0;
                let Some(y) = m.first_return(n - 1, x) else { continue };
                let o = first_return_iterate(&dy, n, IInterval::point(x), 1).unwrap();
                assert!(o.points[1].inflate(1e-8).contains(y), "d={d} n={n} x={x}: {:?} vs {y}", o.points[1]);
            }
        }
    }
}

#[test]
fn first_return_is_self_similar() {
    let dy = dynamics(5.1);
    let t = dy.t().midpoint();
    for n in [2, 3, 5] {
        let c = dy.scale(n - 1);
        let b = dy.member(n - 1);
        for k in 0..100 {
            let y = -t + 2.0 * t * (k as f64 + 0.5) / 100.0;
            let level1 = iterate_map(b, IInterval::point(y), 3);
            let x = c * IInterval::point(y);
            let Ok(o) = first_return_iterate(&dy, n, x, 3) else { continue };
            assert_eq!(o.points.len(), level1.points.len());
            for (p, q) in o.points.iter().zip(&level1.points).skip(1) {
                let scaled = c * *q;
                assert!(p.intersect(&scaled).is_some(), "n={n} y={y}: {p:?} vs {scaled:?}");
                assert!((p.midpoint() - scaled.midpoint()).abs() <= p.width() + scaled.width() + 1e-12);
            }
        }
    }
}

#[test]
fn level_four_orbit_returns_to_t4() {
    let dy = dynamics(5.1);
    let m = Model::new(fixed(5.1));
    let h = m.t.powi(4);
    let x0 = 0.1 * 2.0 * h;
    let mut x = x0;
    let mut oracle = None;
    for step in 1..=3 {
        x = m.first_return(3, x).unwrap();
        if m.in_t(4, x) {
            oracle = Some(step);
            break;
        }
    }
    let step = oracle.expect("float orbit returns to T_4 within three steps");
    let o = first_return_iterate(&dy, 4, tiny(x0), 3).unwrap();
    assert!(dy.t_inner(4).contains_interval(&o.points[step]));
    assert!(o.points[1..step].iter().all(|p| !dy.t_outer(4).contains_interval(p)));
}

#[test]
fn eta_at_level_one_is_one() {
    let dy = dynamics(5.1);
    let r = eta_both(&dy, 1, &small(100, 100));
    assert_eq!((r.eta_lo, r.eta_hi), (1.0, 1.0));
}

#[test]
fn eta_bounds_are_ordered_and_monotone() {
    let dy = dynamics(5.1);
    let cfg = small(2000, 400);
    let mut prev_hi = 1.0;
    for n in 2..=5 {
        let r = eta_both(&dy, n, &cfg);
        assert!(r.is_consistent(), "{r}");
        assert!(r.eta_lo <= r.eta_hi);
        assert!(r.eta_hi <= prev_hi, "eta_hi must not increase with n");
        prev_hi = r.eta_hi;
    }
    let a = eta_both(&dy, 4, &cfg);
    let b = eta_both(&dy, 4, &cfg.doubled_budgets());
    assert!(b.eta_lo >= a.eta_lo && b.eta_hi <= a.eta_hi);
    let fine = eta_both(&dy, 4, &RunConfig { pieces: 8000, ..cfg });
    assert!(fine.eta_hi <= a.eta_hi + 1e-12 && fine.eta_lo >= a.eta_lo - 1e-12);
    assert!(eta_upper(&dy, 4, &cfg).eta_lo == 0.0 && eta_lower(&dy, 4, &cfg).eta_hi == 1.0);
}

#[test]
fn eta_bounds_bracket_simulation() {
    let dy = dynamics(5.1);
    let m = Model::new(fixed(5.1));
    let r = eta_both(&dy, 3, &small(4000, 1000));
    let samples = 4000;
    let mut hits = 0;
    for k in 0..samples {
        let mut x = -m.t + 2.0 * m.t * (k as f64 + 0.5) / samples as f64;
        for _ in 0..1000 {
            if m.in_t(3, x) {
                hits += 1;
                break;
            }
            match m.map(CycleMember::F, x) {
                Some(y) => x = y,
                None => break,
            }
        }
    }
    let est = hits as f64 / samples as f64;
    assert!(r.eta_lo <= est + 0.02 && est <= r.eta_hi + 0.02, "{r} vs {est}");
}

#[test]
fn critical_piece_is_counted_like_any_other() {
    let dy = dynamics(5.1);
    let f = dy.base();
    let piece = IInterval::new(-1e-6, 1e-6).unwrap();
    assert_eq!(classify_eta(f, piece, dy.t_inner(2), dy.t_outer(2), 10), EtaOutcome::Hit);
}

fn poisoned(k: usize) -> bool {
    (k.wrapping_mul(2654435761) >> 7) % 3 == 0
}

#[test]
fn injected_ambiguity_moves_eta_bounds_the_safe_way() {
    let dy = dynamics(5.1);
    let f = dy.base();
    let (n, budget) = (3, 300);
    let (inner, outer) = (dy.t_inner(n), dy.t_outer(n));
    let part = Partition::of_t1(&dy, 600);
    let key = |p: IInterval| (p.lo().to_bits() >> 20) as usize;
    let mut honest = (0.0, 0.0);
    let mut noisy = (0.0, 0.0);
    for k in 0..part.pieces {
        let x = part.piece(k);
        let (l, u) = refine_with(x, 2, &|p| classify_eta(f, p, inner, outer, budget));
        honest.0 += l.iter().map(IInterval::width).sum::<f64>();
        honest.1 += u.iter().map(IInterval::width).sum::<f64>();
        let (l, u) = refine_with(x, 2, &|p| if poisoned(key(p)) { EtaOutcome::Unresolved } else { classify_eta(f, p, inner, outer, budget) });
        noisy.0 += l.iter().map(IInterval::width).sum::<f64>();
        noisy.1 += u.iter().map(IInterval::width).sum::<f64>();
    }
    assert!(noisy.0 <= honest.0 && noisy.1 >= honest.1, "{honest:?} {noisy:?}");
    assert!(noisy.0 < honest.0 || noisy.1 > honest.1);
}

#[test]
fn injected_ambiguity_lowers_zeta_lower() {
    let dy = dynamics(5.1);
    let (n, cfg) = (3, small(600, 300));
    let part = Partition::of_t1(&dy, cfg.pieces);
    let key = |p: IInterval| (p.lo().to_bits() >> 20) as usize;
    let mut honest = 0.0;
    let mut noisy = 0.0;
    for k in 0..part.pieces {
        let x = part.piece(k);
        honest += refine_zeta_with(x, (2, 2), &|p| classify_zeta(&dy, n, p, &cfg, None)).iter().map(IInterval::width).sum::<f64>();
        noisy += refine_zeta_with(x, (2, 2), &|p| if poisoned(key(p)) { ZetaOutcome::AmbiguousEscape } else { classify_zeta(&dy, n, p, &cfg, None) })
            .iter()
            .map(IInterval::width)
            .sum::<f64>();
    }
    assert!(noisy < honest, "{honest} {noisy}");
}

#[test]
fn pieces_staying_in_the_return_domain_are_not_counted() {
    let dy = dynamics(5.1);
    let cfg = RunConfig { return_budget: 0, ..small(10, 10) };
    let p = IInterval::new(-1e-4, 1e-4).unwrap();
    assert_eq!(classify_zeta(&dy, 4, p, &cfg, None), ZetaOutcome::Rejected);
    let cfg = small(10, 10);
    let p = IInterval::new(-1e-9, 1e-9).unwrap();
    assert!(matches!(place(dy.member(3), p), Place::Inside(Branch::T)));
    assert_ne!(classify_zeta(&dy, 4, p, &cfg, None), ZetaOutcome::Counted);
}

#[test]
fn zeta_lower_is_monotone_in_budgets() {
    let dy = dynamics(5.1);
    let cfg = small(1500, 150);
    let a = zeta_lower(&dy, 4, &cfg);
    let b = zeta_lower(&dy, 4, &cfg.doubled_budgets());
    assert!(a.zeta_lo > 0.0);
    assert!(b.zeta_lo >= a.zeta_lo);
    let nm = zeta_nm_lower(&dy, 4, 2, &cfg);
    assert!(nm.zeta_lo <= a.zeta_lo);
}

#[test]
fn zeta_bounds_are_ordered() {
    for (d, n) in [(5.1, 3), (5.1, 4), (3.8, 4)] {
        let dy = dynamics(d);
        let cfg = small(1500, 300);
        let lo = zeta_lower(&dy, n, &cfg);
        let hi = zeta_upper(&dy, n, &cfg);
        let r = lo.merge(&hi);
        assert!(r.is_consistent(), "d={d} n={n}: {r}");
        assert!(r.zeta_hi < 1.0);
    }
}

#[test]
fn zeta_upper_degrades_to_one_at_depth_zero() {
    let dy = dynamics(5.1);
    let cfg = RunConfig { preimage_depth: 0, ..small(10, 10) };
    assert_eq!(zeta_upper(&dy, 4, &cfg).zeta_hi, 1.0);
    let cfg = RunConfig { return_depth: 0, ..small(10, 10) };
    assert_eq!(zeta_upper(&dy, 4, &cfg).zeta_hi, 1.0);
}

#[test]
fn zeta_upper_is_monotone_in_return_depth() {
    let dy = dynamics(5.1);
    let mut prev = 1.0;
    for k in 1..=5 {
        let r = zeta_upper(&dy, 4, &RunConfig { return_depth: k, ..small(10, 10) });
        assert!(r.zeta_hi <= prev, "K={k}: {} > {prev}", r.zeta_hi);
        prev = r.zeta_hi;
    }
    assert!(prev < 1.0);
}

#[test]
fn preimages_map_into_their_target() {
    let dy = dynamics(5.1);
    let m = Model::new(fixed(5.1));
    for member in [CycleMember::F, CycleMember::G] {
        let map = dy.map(member);
        for s in [dy.t_inner(4), IInterval::new(0.2, 0.3).unwrap(), IInterval::new(-0.9, -0.7).unwrap(), IInterval::new(-0.05, 0.4).unwrap()] {
            let comps = preimages(map, s);
            assert!(!comps.is_empty() || s.hi() < -0.8);
            for c in comps {
                for k in 0..=20 {
                    let x = c.lo() + c.width() * k as f64 / 20.0;
                    let y = m.map(member, x).unwrap();
                    assert!(s.inflate(1e-9).contains(y), "{member:?} {s:?}: F({x}) = {y}");
                }
            }
        }
    }
}

#[test]
fn preimage_tree_lands_in_t_n() {
    let dy = dynamics(5.1);
    let m = Model::new(fixed(5.1));
    let comps = preimage_stage(&dy, 4, 4, JobShard::WHOLE);
    assert!(!comps.is_empty());
    for c in comps.iter().step_by(7) {
        let mut x = c.midpoint();
        let mut landed = false;
        for _ in 0..4 {
            x = m.map(CycleMember::F, x).unwrap();
            if m.in_t(4, x) {
                landed = true;
                break;
            }
        }
        assert!(landed, "{c:?}");
    }
}

#[test]
fn shards_merge_to_the_whole_run() {
    let dy = dynamics(5.1);
    let cfg = small(900, 200);
    let whole = eta_sets(&dy, 3, &cfg, JobShard::WHOLE);
    let parts: Vec<EtaSets> = (0..4).map(|i| eta_sets(&dy, 3, &cfg, JobShard::new(i, 4).unwrap())).collect();
    assert_eq!(EtaSets::merge(&parts), whole);

    let whole = zeta_lower_set(&dy, 3, None, &cfg, JobShard::WHOLE);
    let parts: Vec<SegmentSet> = (0..3).map(|i| zeta_lower_set(&dy, 3, None, &cfg, JobShard::new(i, 3).unwrap())).collect();
    assert_eq!(SegmentSet::union_all(parts.iter()), whole);

    let whole = preimage_stage(&dy, 4, 5, JobShard::WHOLE);
    let mut parts: Vec<IInterval> = (0..5).flat_map(|i| preimage_stage(&dy, 4, 5, JobShard::new(i, 5).unwrap())).collect();
    let key = |p: &IInterval| (p.lo().to_bits(), p.hi().to_bits());
    let mut whole_sorted = whole.clone();
    whole_sorted.sort_by_key(key);
    parts.sort_by_key(key);
    assert_eq!(parts, whole_sorted);

    let reduced = reduce_stage(&dy, 4, &whole);
    let ret = return_stage(&dy, 4, &reduced, 3, JobShard::WHOLE);
    let parts: Vec<SegmentSet> = (0..3).map(|i| return_stage(&dy, 4, &reduced, 3, JobShard::new(i, 3).unwrap())).collect();
    assert_eq!(SegmentSet::union_all(parts.iter()), ret);
}

#[test]
fn reduced_set_avoids_t_n_and_j_n() {
    let dy = dynamics(5.1);
    let comps = preimage_stage(&dy, 4, 6, JobShard::WHOLE);
    let reduced = reduce_stage(&dy, 4, &comps);
    assert!(!reduced.is_empty());
    let c = dy.scale(3);
    for s in reduced.segments() {
        let back = c * *s;
        assert!(dy.t_outer(3).contains_interval(&back));
        assert!(back.intersect(&dy.t_inner(4)).is_none());
        assert!(!dy.j_outer(4).contains_interval(&back));
    }
}

#[test]
fn recursive_check_smallest_instances() {
    let dy = dynamics(5.1);
    let cfg = small(2000, 400);
    let c = 29.45;
    for (n, m) in [(1, 1), (2, 1)] {
        let eta_n = eta_both(&dy, n, &cfg).eta();
        let eta_m1 = eta_both(&dy, m + 1, &cfg).eta();
        let eta_nm = eta_both(&dy, n + m, &cfg).eta();
        let zeta = if n == 1 {
            Window { lo: 0.0, hi: 1.0 }
        } else {
            let lo = zeta_nm_lower(&dy, n, m, &cfg);
            let hi = zeta_upper(&dy, n, &cfg);
            Window { lo: lo.zeta_lo, hi: hi.zeta_hi }
        };
        let chk = recursive_inequality_check(eta_n, eta_m1, eta_nm, zeta, c);
        assert!(chk.holds, "n={n} m={m}: {chk:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn images_enclose_model(x in -0.56f64..0.56, member in prop::bool::ANY) {
        let dy = dynamics(5.1);
        let m = Model::new(fixed(5.1));
        let member = if member { CycleMember::F } else { CycleMember::G };
        let map = dy.map(member);
        let p = IInterval::point(x);
        if let Some(img) = map.image(p).unwrap() {
            let y = m.map(member, x).unwrap();
            prop_assert!(img.inflate(1e-9).contains(y));
        }
    }

    #[test]
    fn orbit_status_matches_last_point(x in -0.56f64..0.56, w in 0.0f64..1e-4, steps in 0usize..60) {
        let dy = dynamics(5.1);
        let o = iterate_map(dy.base(), IInterval::new(x, x + w).unwrap(), steps);
        prop_assert_eq!(o.points.len(), o.branches.len() + 1);
        prop_assert!(o.points.len() <= steps + 1);
        if o.status == Status::Escaped {
            prop_assert!(dy.base().certainly_outside(o.last()));
        }
    }
}

#[test]
fn center_map_sits_inside_the_enclosure() {
    let center = CycleDynamics::for_run(fixed(3.8), &RunConfig::DESK).unwrap();
    let ball = CycleDynamics::for_run(fixed(3.8), &RunConfig { map: MapChoice::Enclosure, ..RunConfig::DESK }).unwrap();
    for x in [-0.4, -0.1, 0.05, 0.3] {
        let p = IInterval::point(x);
        let (Some(a), Some(b)) = (center.base().image(p).unwrap(), ball.base().image(p).unwrap()) else { continue };
        assert!(b.contains_interval(&a), "{x}: {a:?} {b:?}");
        assert!(a.width() < 1e-13 && a.width() < b.width());
    }
}
