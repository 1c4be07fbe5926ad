mod support;

use support::soundness;

#[test]
fn interval_operations_are_sound() {
    for t in soundness::run(100_000) {
        println!("{:<10} {:>7} checks {:>3} violations", t.op, t.checks, t.violations);
        assert_eq!(t.violations, 0, "{}", t.op);
    }
}
