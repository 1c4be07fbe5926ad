use super::*;
use crate::renorm::{renormalize, TangentVector};

#[test]
fn finder_reproduces_reference_scalars() {
    for d in [3.8, 5.1] {
        let z = approximate_fixed_point(d, 40).unwrap();
        let [cv, i, j, t] = reference_scalars(d).unwrap();
        let got = [z.critical_value().unwrap().midpoint(), z.i.midpoint(), z.j.midpoint(), z.t.midpoint()];
        for (a, b) in got.iter().zip([cv, i, j, t]) {
            assert!((a - b).abs() <= 1e-10, "d={d}: {a} vs {b}");
        }
    }
}

#[test]
fn finder_is_idempotent_at_converged_point() {
    let z = approximate_fixed_point(3.8, 30).unwrap();
    let again = find_approximate_fixed_point(3.8, &z, 5).unwrap();
    assert!(again.diff(&z).norm_l1() <= 1e-14);
}

#[test]
fn newton_operator_at_zero_is_residual() {
    let z = approximate_fixed_point(3.8, 30).unwrap();
    let st = NewtonState::new(&z, 20).unwrap();
    let n0 = newton_operator(&st, &TangentVector::zero(30)).unwrap();
    let r = renormalize(&z).unwrap().output.diff(&z);
    assert_eq!(n0, TangentVector::zero(30).add(&r));
    assert!(n0.norm_l1() < 1e-12);
    assert!(st.defect < 1e-10);
}

#[test]
fn certificate_invariant_and_degenerate_ball() {
    let z = approximate_fixed_point(3.8, 40).unwrap();
    let st = NewtonState::new(&z, 40).unwrap();
    let c = certify_contraction(&st, 1e-10).unwrap();
    assert_eq!(c.valid, c.d_bound < 1.0 && c.epsilon < (1.0 - c.d_bound) * c.delta);
    assert!(c.valid, "{c}");
    let enclosure = c.enclosure(&st.z0).unwrap();
    assert!(enclosure.t.contains(z.t.midpoint()));
    let zero = certify_contraction(&st, 0.0).unwrap();
    assert!(!zero.valid);
}

#[test]
fn smaller_valid_ball_stays_valid() {
    let z = approximate_fixed_point(3.8, 40).unwrap();
    let st = NewtonState::new(&z, 40).unwrap();
    let big = certify_contraction(&st, 1e-9).unwrap();
    assert!(big.valid);
    let lo = big.epsilon / (1.0 - big.d_bound);
    let small = certify_contraction(&st, 4.0 * lo).unwrap();
    assert!(small.valid, "{small}");
}

#[test]
fn doubling_truncation_keeps_residual() {
    let a = approximate_fixed_point(3.8, 30).unwrap();
    let b = approximate_fixed_point(3.8, 60).unwrap();
    let ea = certify_contraction(&NewtonState::new(&a, 20).unwrap(), 1e-9).unwrap();
    let eb = certify_contraction(&NewtonState::new(&b, 20).unwrap(), 1e-9).unwrap();
    assert!(eb.epsilon <= 2.0 * ea.epsilon.max(1e-13), "{} {}", ea.epsilon, eb.epsilon);
}
