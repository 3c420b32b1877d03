//! Quaternionic cross-ratio of four points, the corner-entry identities it
//! satisfies for `h(q_inf), h(q_0)`, and the inequalities between the corner
//! products of an element.

use serde::{Deserialize, Serialize};

use crate::geometry::{apply, Position, ProjectivePoint};
use crate::qmatrix::{vnorm, QMatrix};
use crate::quaternion::Quaternion;
use crate::spn1::{form_unchecked, SpElement};

/// A form value `<a, b>` counts as zero below this multiple of `|a| |b|`.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// The denominator pairing that vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Vanishing {
    /// `<w1, z2>`
    W1Z2,
    /// `<w2, z1>`
    W2Z1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRatioValue {
    /// `<w1,z1><w1,z2>^{-1}<w2,z2><w2,z1>^{-1}` on the stored lifts; `None`
    /// when degenerate.
    pub value: Option<Quaternion>,
    /// `|<w1,z1>| |<w2,z2>| / (|<w1,z2>| |<w2,z1>|)`; NaN when degenerate.
    pub abs_value: f64,
    pub vanishing: Option<Vanishing>,
}

impl CrossRatioValue {
    pub fn degenerate(&self) -> bool {
        self.vanishing.is_some()
    }
}

fn pairing(a: &ProjectivePoint, b: &ProjectivePoint) -> (Quaternion, bool) {
    let v = form_unchecked(a.lift(), b.lift());
    let small = v.modulus() <= DEGENERACY_TOL * vnorm(a.lift()) * vnorm(b.lift());
    (v, small)
}

/// `[z1, z2, w1, w2]`, evaluated left to right as written.
pub fn cross_ratio(
    z1: &ProjectivePoint,
    z2: &ProjectivePoint,
    w1: &ProjectivePoint,
    w2: &ProjectivePoint,
) -> CrossRatioValue {
    debug_assert!([z1, z2, w1, w2].iter().all(|p| p.position() != Position::Outside));
    let (a, _) = pairing(w1, z1);
    let (b, b_small) = pairing(w1, z2);
    let (c, _) = pairing(w2, z2);
    let (d, d_small) = pairing(w2, z1);
    let vanishing = if b_small {
        Some(Vanishing::W1Z2)
    } else if d_small {
        Some(Vanishing::W2Z1)
    } else {
        None
    };
    if vanishing.is_some() {
        return CrossRatioValue {
            value: None,
            abs_value: f64::NAN,
            vanishing,
        };
    }
    let value = a * b.inverse().expect("non-zero") * c * d.inverse().expect("non-zero");
    CrossRatioValue {
        value: Some(value),
        abs_value: a.modulus() * c.modulus() / (b.modulus() * d.modulus()),
        vanishing,
    }
}

/// Both sides of the two corner-entry identities for `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryIdentities {
    /// `|[h(q_inf), q_0, q_inf, h(q_0)]|`
    pub lhs1: f64,
    /// `|a_{n+1,n} a_{n,n+1}|`
    pub rhs1: f64,
    /// `|[h(q_inf), q_inf, q_0, h(q_0)]|`
    pub lhs2: f64,
    /// `|a_{n,n} a_{n+1,n+1}|`
    pub rhs2: f64,
    pub vanishing1: Option<Vanishing>,
    pub vanishing2: Option<Vanishing>,
}

impl EntryIdentities {
    /// `|lhs - rhs| / rhs` for each identity (0 when both sides vanish).
    pub fn relative_errors(&self) -> [f64; 2] {
        let rel = |l: f64, r: f64| {
            let d = (l - r).abs();
            if d == 0.0 {
                0.0
            } else {
                d / r.abs()
            }
        };
        [rel(self.lhs1, self.rhs1), rel(self.lhs2, self.rhs2)]
    }
}

pub fn entry_identity_check(h: &SpElement) -> EntryIdentities {
    let n = h.n();
    let q0 = ProjectivePoint::q_zero(n);
    let qi = ProjectivePoint::q_infinity(n);
    let hq0 = apply(h, &q0).expect("dimensions agree");
    let hqi = apply(h, &qi).expect("dimensions agree");
    let c1 = cross_ratio(&hqi, &q0, &qi, &hq0);
    let c2 = cross_ratio(&hqi, &qi, &q0, &hq0);
    EntryIdentities {
        lhs1: c1.abs_value,
        rhs1: (h.a_n1n() * h.a_nn1()).modulus(),
        lhs2: c2.abs_value,
        rhs2: (h.a_nn() * h.a_n1n1()).modulus(),
        vanishing1: c1.vanishing,
        vanishing2: c2.vanishing,
    }
}

pub const LEMMA_LABELS: [&str; 5] = [
    "2 |a_nn a_n1n1|^1/2 |a_nn1 a_n1n|^1/2 - |beta* alpha|",
    "2 |a_nn a_n1n1|^1/2 |a_nn1 a_n1n|^1/2 - |gamma theta*|",
    "|a_nn1 a_n1n|^1/2 + 1 - |a_nn a_n1n1|^1/2",
    "|a_nn a_n1n1|^1/2 + 1 - |a_nn1 a_n1n|^1/2",
    "|a_nn a_n1n1|^1/2 + |a_nn1 a_n1n|^1/2 - 1",
];

/// Slacks of the five corner-product inequalities, each non-negative for
/// every element of the group; order as in [`LEMMA_LABELS`].
pub fn lemma32_residuals(h: &SpElement) -> [f64; 5] {
    let diag = (h.a_nn() * h.a_n1n1()).modulus().sqrt();
    let off = (h.a_nn1() * h.a_n1n()).modulus().sqrt();
    let beta_alpha = scalar(&h.beta().star().matmul(&h.alpha()).expect("conformable"));
    let gamma_theta = scalar(&h.gamma().matmul(&h.theta().star()).expect("conformable"));
    [
        2.0 * diag * off - beta_alpha.modulus(),
        2.0 * diag * off - gamma_theta.modulus(),
        off + 1.0 - diag,
        diag + 1.0 - off,
        diag + off - 1.0,
    ]
}

fn scalar(m: &QMatrix) -> Quaternion {
    m[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion as Q;
    use crate::spn1::{is_member, random_element_seeded, random_quaternion, stream_rng};

    fn diag_122() -> SpElement {
        is_member(&QMatrix::from_diag(&[Q::ONE, Q::real(2.0), Q::real(0.5)]), 1e-12).unwrap()
    }

    /// `h` with `h(q_0) = q_inf` and `h(q_inf) = q_0`.
    fn swap() -> SpElement {
        let m = QMatrix::from_rows(vec![
            vec![Q::ONE, Q::ZERO, Q::ZERO],
            vec![Q::ZERO, Q::ZERO, Q::real(2.0)],
            vec![Q::ZERO, Q::real(0.5), Q::ZERO],
        ])
        .unwrap();
        is_member(&m, 1e-12).unwrap()
    }

    #[test]
    fn null_numerators() {
        let (q0, qi) = (ProjectivePoint::q_zero(2), ProjectivePoint::q_infinity(2));
        let c = cross_ratio(&qi, &q0, &qi, &q0);
        assert_eq!(c.value, Some(Q::ZERO));
        assert_eq!(c.abs_value, 0.0);
        assert!(!c.degenerate());
        let d = cross_ratio(&q0, &qi, &q0, &qi);
        assert_eq!(d.abs_value, 0.0);
        let e = cross_ratio(&q0, &q0, &q0, &qi);
        assert_eq!(e.vanishing, Some(Vanishing::W1Z2));
    }

    #[test]
    fn repeated_first_pair_gives_one() {
        let z = ProjectivePoint::new(vec![Q::new(0.1, 0.2, 0.0, 0.0), Q::real(0.5), Q::ONE]).unwrap();
        let w1 = ProjectivePoint::new(vec![Q::ZERO, Q::new(0.0, 0.3, 0.1, 0.0), Q::ONE]).unwrap();
        let w2 = ProjectivePoint::q_zero(2);
        let c = cross_ratio(&z, &z, &w1, &w2);
        assert!((c.abs_value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lift_rescaling() {
        let mut rng = stream_rng(3, 0);
        let g = random_element_seeded(2, 11, 5).unwrap();
        let pts: Vec<ProjectivePoint> = [
            ProjectivePoint::q_zero(2),
            ProjectivePoint::q_infinity(2),
            ProjectivePoint::new(vec![Q::ZERO, Q::real(0.5), Q::ONE]).unwrap(),
            ProjectivePoint::new(vec![Q::new(0.2, 0.0, 0.1, 0.0), Q::new(0.9, 0.0, 0.0, 0.3), Q::ONE]).unwrap(),
        ]
        .iter()
        .map(|p| apply(&g, p).unwrap())
        .collect();
        let base = cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]);
        let mut changed = false;
        for _ in 0..100 {
            let r: Vec<ProjectivePoint> = pts
                .iter()
                .map(|p| p.rescaled(random_quaternion(&mut rng)).unwrap())
                .collect();
            let c = cross_ratio(&r[0], &r[1], &r[2], &r[3]);
            assert!((c.abs_value - base.abs_value).abs() <= 1e-10 * base.abs_value.max(1.0));
            changed |= c.value.unwrap().max_abs_diff(base.value.unwrap()) > 1e-6;
        }
        assert!(changed);
    }

    #[test]
    fn entry_identities_worked() {
        let e = entry_identity_check(&diag_122());
        assert_eq!((e.lhs1, e.rhs1), (0.0, 0.0));
        assert_eq!((e.lhs2, e.rhs2), (1.0, 1.0));
        assert_eq!(e.vanishing1, None);
        assert_eq!(e.vanishing2, None);

        let s = entry_identity_check(&swap());
        assert_eq!(s.rhs2, 0.0);
        assert_eq!(s.lhs2, 0.0);
        assert_eq!((s.lhs1, s.rhs1), (1.0, 1.0));
    }

    #[test]
    fn entry_identities_random() {
        for seed in 0..200 {
            let h = random_element_seeded(3, seed, 8).unwrap();
            let e = entry_identity_check(&h);
            let [r1, r2] = e.relative_errors();
            assert!(r1 <= 1e-9 && r2 <= 1e-9, "seed {seed}: {e:?}");
        }
    }

    #[test]
    fn lemma_slacks_worked() {
        assert_eq!(lemma32_residuals(&SpElement::identity(2)), [0.0, 0.0, 0.0, 2.0, 0.0]);
        assert_eq!(lemma32_residuals(&diag_122()), [0.0, 0.0, 0.0, 2.0, 0.0]);
        assert_eq!(lemma32_residuals(&swap()), [0.0, 0.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn lemma_slacks_random() {
        for n in 1..=3 {
            for seed in 0..200 {
                let h = random_element_seeded(n, seed, 10).unwrap();
                let s = lemma32_residuals(&h);
                assert!(s.iter().all(|&x| x >= -1e-9), "n {n} seed {seed}: {s:?}");
            }
        }
    }
}
