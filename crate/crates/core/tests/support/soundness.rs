//! Randomized containment and inclusion-monotonicity checks for the interval
//! operations. Field operations are checked exactly against rationals; the
//! elementary functions against libm widened by one ulp.

use fibren::rigor::{exp, ln, pow_real, root_real, IInterval};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub op: &'static str,
    pub checks: usize,
    pub violations: usize,
}

#[derive(Clone, Copy)]
enum Domain {
    Any,
    Positive,
    NonZero,
    Small,
}

fn float(rng: &mut StdRng, dom: Domain) -> f64 {
    let e = match dom {
        Domain::Small => rng.gen_range(-20..9),
        _ => rng.gen_range(-40..40),
    };
    let m: f64 = rng.gen_range(1.0..2.0);
    let x = m * 2f64.powi(e);
    match dom {
        Domain::Positive => x,
        _ if rng.gen_bool(0.5) => -x,
        _ => x,
    }
}

fn interval(rng: &mut StdRng, dom: Domain) -> IInterval {
    let a = float(rng, dom);
    let w = match rng.gen_range(0..4) {
        0 => 0.0,
        1 => a.abs() * 2f64.powi(-rng.gen_range(1..53)),
        2 => a.abs() * rng.gen_range(0.0..1.0),
        _ => a.abs() * rng.gen_range(0.0..4.0),
    };
    let (lo, hi) = if rng.gen_bool(0.5) { (a, a + w) } else { (a - w, a) };
    let (lo, hi) = match dom {
        Domain::Positive if lo <= 0.0 => (a * 0.5, a),
        Domain::NonZero if lo <= 0.0 && hi >= 0.0 && a > 0.0 => (a * 0.5, a),
        Domain::NonZero if lo <= 0.0 && hi >= 0.0 => (a, a * 0.5),
        _ => (lo, hi),
    };
    IInterval::new(lo, hi).unwrap()
}

fn point(rng: &mut StdRng, x: IInterval) -> f64 {
    match rng.gen_range(0..4) {
        0 => x.lo(),
        1 => x.hi(),
        _ => (x.lo() + rng.gen_range(0.0..1.0) * (x.hi() - x.lo())).clamp(x.lo(), x.hi()),
    }
}

/// A superset of `x`.
fn widen(rng: &mut StdRng, x: IInterval, dom: Domain) -> IInterval {
    let s = x.mag().max(f64::MIN_POSITIVE) * rng.gen_range(0.0..0.5);
    let mut lo = (x.lo() - s * rng.gen_range(0.0..1.0)).min(x.lo());
    let mut hi = (x.hi() + s * rng.gen_range(0.0..1.0)).max(x.hi());
    if matches!(dom, Domain::Positive | Domain::NonZero) && (lo <= 0.0) != (x.lo() <= 0.0) {
        lo = x.lo();
    }
    if matches!(dom, Domain::NonZero) && (hi >= 0.0) != (x.hi() >= 0.0) {
        hi = x.hi();
    }
    IInterval::new(lo, hi).unwrap()
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite endpoint")
}

fn encloses_exact(y: IInterval, v: &BigRational) -> bool {
    let lo_ok = y.lo() == f64::NEG_INFINITY || y.lo() == -f64::MAX || rat(y.lo()) <= *v;
    let hi_ok = y.hi() == f64::INFINITY || y.hi() == f64::MAX || *v <= rat(y.hi());
    lo_ok && hi_ok
}

fn encloses_libm(y: IInterval, v: f64) -> bool {
    y.lo() <= v.next_down() && v.next_up() <= y.hi()
}

/// `x^(1/d)` lies in `y` iff `lo^d <= x <= hi^d`; checked through libm `powf`.
fn encloses_root(y: IInterval, x: f64, d: f64) -> bool {
    y.lo().powf(d).next_up() <= x && x <= y.hi().powf(d).next_down()
}

fn powi_exact(x: &BigRational, n: u32) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, _| acc * x)
}

type Unary = fn(IInterval) -> IInterval;
type Binary = fn(IInterval, IInterval) -> IInterval;

fn binary_exact(name: &'static str, n: usize, seed: u64, dom: (Domain, Domain), f: Binary, g: fn(BigRational, BigRational) -> BigRational) -> Tally {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..n {
        let (a, b) = (interval(&mut rng, dom.0), interval(&mut rng, dom.1));
        let y = f(a, b);
        let (x1, x2) = (point(&mut rng, a), point(&mut rng, b));
        if !encloses_exact(y, &g(rat(x1), rat(x2))) {
            violations += 1;
        }
        let (a2, b2) = (widen(&mut rng, a, dom.0), widen(&mut rng, b, dom.1));
        if !f(a2, b2).contains_interval(&y) {
            violations += 1;
        }
    }
    Tally { op: name, checks: 2 * n, violations }
}

fn unary_exact(name: &'static str, n: usize, seed: u64, f: Unary, g: fn(&BigRational) -> BigRational) -> Tally {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..n {
        let a = interval(&mut rng, Domain::Any);
        let y = f(a);
        if !encloses_exact(y, &g(&rat(point(&mut rng, a)))) {
            violations += 1;
        }
        if !f(widen(&mut rng, a, Domain::Any)).contains_interval(&y) {
            violations += 1;
        }
    }
    Tally { op: name, checks: 2 * n, violations }
}

fn unary_libm(name: &'static str, n: usize, seed: u64, dom: Domain, f: Unary, g: fn(f64) -> f64) -> Tally {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..n {
        let a = interval(&mut rng, dom);
        let y = f(a);
        let v = g(point(&mut rng, a));
        if v != 0.0 && v.is_normal() && !encloses_libm(y, v) {
            violations += 1;
        }
        if !f(widen(&mut rng, a, dom)).contains_interval(&y) {
            violations += 1;
        }
    }
    Tally { op: name, checks: 2 * n, violations }
}

fn unary_root(name: &'static str, n: usize, seed: u64, d: f64) -> Tally {
    let mut rng = StdRng::seed_from_u64(seed);
    let f = |a| root_real(a, d).unwrap();
    let mut violations = 0;
    for _ in 0..n {
        let a = interval(&mut rng, Domain::Positive);
        let y = f(a);
        if !encloses_root(y, point(&mut rng, a), d) {
            violations += 1;
        }
        if !f(widen(&mut rng, a, Domain::Positive)).contains_interval(&y) {
            violations += 1;
        }
    }
    Tally { op: name, checks: 2 * n, violations }
}

/// `n` containment and `n` monotonicity checks per operation.
pub fn run(n: usize) -> Vec<Tally> {
    vec![
        binary_exact("add", n, 1, (Domain::Any, Domain::Any), |a, b| a + b, |x, y| x + y),
        binary_exact("sub", n, 2, (Domain::Any, Domain::Any), |a, b| a - b, |x, y| x - y),
        binary_exact("mul", n, 3, (Domain::Any, Domain::Any), |a, b| a * b, |x, y| x * y),
        binary_exact("div", n, 4, (Domain::Any, Domain::NonZero), |a, b| a / b, |x, y| {
            assert!(!y.is_zero());
            x / y
        }),
        unary_exact("neg", n, 5, |a| -a, |x| -x.clone()),
        unary_exact("sqr", n, 6, |a| a.sqr(), |x| x * x),
        unary_exact("powi3", n, 7, |a| a.powi(3), |x| powi_exact(x, 3)),
        unary_exact("powi4", n, 8, |a| a.powi(4), |x| powi_exact(x, 4)),
        unary_exact("abs", n, 9, |a| a.abs(), |x| if *x < BigRational::zero() { -x.clone() } else { x.clone() }),
        unary_exact("scale", n, 10, |a| a.scale(-0.3), |x| x * rat(-0.3)),
        unary_libm("exp", n, 11, Domain::Small, exp, f64::exp),
        unary_libm("ln", n, 12, Domain::Positive, |a| ln(a).unwrap(), f64::ln),
        unary_libm("pow_3.8", n, 13, Domain::Positive, |a| pow_real(a, 3.8).unwrap(), |x| x.powf(3.8)),
        unary_libm("pow_5.1", n, 14, Domain::Positive, |a| pow_real(a, 5.1).unwrap(), |x| x.powf(5.1)),
        unary_root("root_3.8", n, 15, 3.8),
        unary_root("root_5.1", n, 16, 5.1),
    ]
}

