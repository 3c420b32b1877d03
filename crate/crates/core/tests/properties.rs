use proptest::prelude::*;

use qhyper::crossratio::{cross_ratio, lemma32_residuals};
use qhyper::geometry::{apply, ProjectivePoint};
use qhyper::spectral::{classify, Kind, UNIT_TOL};
use qhyper::spn1::random_element_seeded;
use qhyper::Quaternion;

fn quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(Quaternion::from_array)
}

fn nonzero() -> impl Strategy<Value = Quaternion> {
    quaternion().prop_filter("nonzero", |q| q.modulus() > 1e-3)
}

proptest! {
    #[test]
    fn real_part_is_cyclic(a in quaternion(), b in quaternion()) {
        let s = 1.0 + a.modulus() * b.modulus();
        prop_assert!(((a * b).re() - (b * a).re()).abs() <= 1e-12 * s);
    }

    #[test]
    fn real_part_bound(a in quaternion(), b in quaternion()) {
        let ab = a * b;
        let lhs = 2.0 * a.re() * b.re() - ab.re();
        let dot = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
        let s = 1.0 + a.modulus() * b.modulus();
        prop_assert!((lhs - dot).abs() <= 1e-12 * s);
        prop_assert!(lhs <= ab.modulus() + 1e-12 * s);
    }

    #[test]
    fn modulus_is_multiplicative(a in quaternion(), b in quaternion()) {
        let s = 1.0 + a.modulus() * b.modulus();
        prop_assert!(((a * b).modulus() - a.modulus() * b.modulus()).abs() <= 1e-12 * s);
    }

    #[test]
    fn conjugation_keeps_class(a in quaternion(), b in nonzero()) {
        let c = b * a * b.inverse().unwrap();
        let s = 1.0 + a.modulus();
        prop_assert!((c.re() - a.re()).abs() <= 1e-12 * s);
        prop_assert!((c.modulus() - a.modulus()).abs() <= 1e-12 * s);
        prop_assert!(c.similar(a, 1e-10 * s));
    }

    #[test]
    fn inverse_round_trip(a in nonzero()) {
        let e = a * a.inverse().unwrap() - Quaternion::ONE;
        prop_assert!(e.modulus() <= 1e-13);
    }

    #[test]
    fn product_is_associative(a in quaternion(), b in quaternion(), c in quaternion()) {
        let s = 1.0 + a.modulus() * b.modulus() * c.modulus();
        prop_assert!(((a * b) * c).max_abs_diff(a * (b * c)) <= 1e-12 * s);
    }

    #[test]
    fn conj_reverses_products(a in quaternion(), b in quaternion()) {
        let s = 1.0 + a.modulus() * b.modulus();
        prop_assert!((a * b).conj().max_abs_diff(b.conj() * a.conj()) <= 1e-12 * s);
    }

    #[test]
    fn corner_slacks_nonnegative(n in 1usize..=3, seed in any::<u64>(), wl in 1usize..=16) {
        let h = random_element_seeded(n, seed, wl).unwrap();
        prop_assert!(lemma32_residuals(&h).iter().all(|&s| s >= -1e-9));
    }

    #[test]
    fn inverse_composes_to_identity(n in 1usize..=3, seed in any::<u64>(), wl in 1usize..=12) {
        let h = random_element_seeded(n, seed, wl).unwrap();
        let e = h.compose(&h.group_inverse()).unwrap();
        prop_assert!(e.is_identity(1e-8 * h.matrix().max_norm().powi(2)));
    }

    #[test]
    fn classification_is_conjugation_invariant(seed in any::<u64>(), wl in 1usize..=8) {
        let g = random_element_seeded(2, seed, wl).unwrap();
        let c = random_element_seeded(2, seed ^ 0x9e37_79b9, 3).unwrap();
        let a = classify(&g, UNIT_TOL).unwrap();
        let b = classify(&c.conjugate(&g).unwrap(), UNIT_TOL).unwrap();
        if a.kind == Kind::Loxodromic {
            prop_assert_eq!(b.kind, Kind::Loxodromic);
        }
    }

    #[test]
    fn cross_ratio_is_an_invariant(seed in any::<u64>(), wl in 1usize..=8) {
        let g = random_element_seeded(2, seed, wl).unwrap();
        let pts = [
            ProjectivePoint::q_zero(2),
            ProjectivePoint::q_infinity(2),
            ProjectivePoint::new(vec![Quaternion::ZERO, Quaternion::real(0.5), Quaternion::ONE]).unwrap(),
            ProjectivePoint::new(vec![Quaternion::new(0.2, 0.1, 0.0, 0.0), Quaternion::new(1.0, 0.0, 0.3, 0.0), Quaternion::ONE]).unwrap(),
        ];
        let moved: Vec<ProjectivePoint> = pts.iter().map(|p| apply(&g, p).unwrap()).collect();
        let a = cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]);
        let b = cross_ratio(&moved[0], &moved[1], &moved[2], &moved[3]);
        prop_assert!(!a.degenerate());
        if !b.degenerate() {
            prop_assert!((a.abs_value - b.abs_value).abs() <= 1e-7 * a.abs_value.max(1.0));
        }
    }
}
