use std::sync::OnceLock;

use crate::fixpoint::{certified_fixed_point, Profile};
use crate::renorm::RenormElement;

/// Certified enclosure of the fixed point of degree `d` (3.8 or 5.1), computed once per test binary.
pub fn fixed(d: f64) -> &'static RenormElement {
    static A: OnceLock<RenormElement> = OnceLock::new();
    static B: OnceLock<RenormElement> = OnceLock::new();
    let cell = if d == 3.8 { &A } else { &B };
    cell.get_or_init(|| {
        let r = certified_fixed_point(d, Profile::STANDARD).unwrap();
        assert!(r.certificate.valid, "{}", r.certificate);
        r.enclosure.unwrap()
    })
}
