use super::*;
use crate::funcspace::FuncEnclosure;
use crate::testutil::fixed;

fn power_map(n: usize) -> RenormElement {
    RenormElement {
        d: 3.8,
        v: IInterval::point(-0.837),
        i: IInterval::point(-0.8984),
        j: IInterval::point(-0.6435),
        t: IInterval::point(0.4491),
        psi: FuncEnclosure::identity(n),
        phi: FuncEnclosure::identity(n),
    }
}

#[test]
fn pure_power_map_has_negative_schwarzian() {
    assert!(schwarzian_nonpositive(&power_map(6), 16).unwrap());
    // Symbolic oracle: S(|x|^d) = -(d^2-1)/(2x^2); with phi = id the
    // normalized T value is -(d^2-1) A^2 / (2 t^2) for every u.
    let f = power_map(6);
    let a = 3.8 * (1.0 + 0.837) / 0.4491;
    let want = -(3.8f64 * 3.8 - 1.0) * a * a / (2.0 * 0.4491 * 0.4491);
    let got = t_branch_normalized(&f, IInterval::point(0.5)).unwrap();
    assert!((got.midpoint() - want).abs() < 1e-9 * want.abs());
}

#[test]
fn linear_branch_numerator_is_zero() {
    let id = FuncEnclosure::identity(5);
    assert_eq!(numerator(&id, IInterval::UNIT).unwrap(), IInterval::ZERO);
}

#[test]
fn positive_schwarzian_is_detected() {
    let mut f = power_map(6);
    let mut cubic = FuncEnclosure::identity(6);
    cubic.set_coeff(3, IInterval::point(0.3));
    f.psi = cubic;
    assert!(!schwarzian_nonpositive(&f, 16).unwrap());
}

#[test]
fn fixed_points_have_nonpositive_schwarzian() {
    for d in [3.8, 5.1] {
        assert!(schwarzian_nonpositive(fixed(d), 64).unwrap(), "d={d}");
    }
}

#[test]
fn koebe_constants_match_reference() {
    for (d, c) in [(3.8, 13.4664644314052974), (5.1, 29.4431036985348317)] {
        let k = koebe_constant(fixed(d)).unwrap();
        assert!(k.c < if d == 3.8 { 13.47 } else { 29.45 }, "d={d}: {}", k.c);
        assert!((k.c - c).abs() < 1e-6, "d={d}: {}", k.c);
    }
}

#[test]
fn koebe_of_unit_space() {
    assert_eq!(koebe_from_tau(IInterval::ONE), Some(4.0));
    assert!(koebe_from_tau(IInterval::point(2.0)).unwrap() < 4.0);
    assert_eq!(koebe_from_tau(IInterval::ZERO), None);
    let t = IInterval::point(0.5);
    assert!(matches!(koebe_from_orbit(t, IInterval::point(-0.4)), Err(DistortionError::NoSpace)));
}

#[test]
fn postcritical_relations_hold() {
    for d in [3.8, 5.1] {
        for member in [CycleMember::F, CycleMember::G] {
            let o = postcritical_orbit_of(fixed(d), 18, member).unwrap();
            assert_eq!(o.x[0], IInterval::ZERO);
            assert!(o.x[1].contains_interval(&fixed(d).critical_value().unwrap()));
            o.check_self_similarity().unwrap();
            o.check_orderings().unwrap();
        }
        let g = postcritical_orbit_of(fixed(d), 18, CycleMember::G).unwrap();
        let ratio = g.x[7] / g.x[4];
        assert!(ratio.intersect(&-fixed(d).t).is_some());
    }
}
