//! Projective model of quaternionic hyperbolic space: points as right
//! projective classes of lifts in `H^{n,1}`, the Siegel-domain projection and
//! the Bergman distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmatrix::{vnorm, vscale_right};
use crate::quaternion::Quaternion;
use crate::spn1::{form_unchecked, SpElement};

/// Relative tolerance for `|<z,z>| <= tol * |z|^2` to count as a boundary point.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Position {
    /// `<z,z> < 0`
    Interior,
    /// `<z,z> = 0`
    Boundary,
    /// `<z,z> > 0`
    Outside,
}

/// A point of `P(H^{n,1})` stored through one of its lifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointJson", into = "PointJson")]
pub struct ProjectivePoint {
    lift: Vec<Quaternion>,
    position: Position,
    self_product: Quaternion,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    lift: Vec<Quaternion>,
}

impl TryFrom<PointJson> for ProjectivePoint {
    type Error = Error;
    fn try_from(p: PointJson) -> Result<Self> {
        ProjectivePoint::new(p.lift)
    }
}

impl From<ProjectivePoint> for PointJson {
    fn from(p: ProjectivePoint) -> Self {
        PointJson { lift: p.lift }
    }
}

/// Image of a point under the right projection.
#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    /// `(z_1 z_{n+1}^{-1}, ..., z_n z_{n+1}^{-1})`
    Finite(Vec<Quaternion>),
    /// The lift has vanishing last coordinate.
    Infinity,
}

impl ProjectivePoint {
    pub fn new(lift: Vec<Quaternion>) -> Result<Self> {
        if lift.len() < 2 {
            return Err(Error::shape("lift of length >= 2", format!("length {}", lift.len())));
        }
        if lift.iter().any(|q| !q.is_finite()) {
            return Err(Error::Domain("lift entries must be finite".into()));
        }
        let norm = vnorm(&lift);
        if norm == 0.0 {
            return Err(Error::Domain("the zero vector is not a projective point".into()));
        }
        let self_product = form_unchecked(&lift, &lift);
        let r = self_product.re();
        let position = if r.abs() <= BOUNDARY_TOL * norm * norm {
            Position::Boundary
        } else if r < 0.0 {
            Position::Interior
        } else {
            Position::Outside
        };
        Ok(Self {
            lift,
            position,
            self_product,
        })
    }

    /// `q_0`, the image of `(0, ..., 0, 1)`.
    pub fn q_zero(n: usize) -> Self {
        let mut v = vec![Quaternion::ZERO; n + 1];
        v[n] = Quaternion::ONE;
        Self::new(v).expect("valid lift")
    }

    /// `q_inf`, the image of `(0, ..., 0, 1, 0)`.
    pub fn q_infinity(n: usize) -> Self {
        let mut v = vec![Quaternion::ZERO; n + 1];
        v[n - 1] = Quaternion::ONE;
        Self::new(v).expect("valid lift")
    }

    pub fn lift(&self) -> &[Quaternion] {
        &self.lift
    }

    pub fn position(&self) -> Position {
        self.position
    }

    pub fn self_product(&self) -> Quaternion {
        self.self_product
    }

    /// `n`, where the lift lives in `H^{n,1}`.
    pub fn n(&self) -> usize {
        self.lift.len() - 1
    }

    /// Same point, lift multiplied on the right by `q`.
    pub fn rescaled(&self, q: Quaternion) -> Result<Self> {
        Self::new(vscale_right(&self.lift, q))
    }

    pub fn project(&self) -> Result<Projection> {
        if self.position == Position::Outside {
            return Err(Error::Domain(
                "point lies outside the closure of the domain".into(),
            ));
        }
        let last = self.lift[self.n()];
        if last.modulus() <= f64::EPSILON * vnorm(&self.lift) {
            return Ok(Projection::Infinity);
        }
        let inv = last.inverse()?;
        Ok(Projection::Finite(
            self.lift[..self.n()].iter().map(|&z| z * inv).collect(),
        ))
    }

    /// Whether the two lifts span the same right line: the best fit
    /// `self.lift * c ~ other.lift` leaves a relative residual `<= tol`.
    pub fn same_point(&self, other: &ProjectivePoint, tol: f64) -> bool {
        self.projective_distance(other) <= tol
    }

    /// Relative residual `|z c - w| / |w|` of the best coordinate-pivoted
    /// right scalar `c`, or infinity for mismatched dimensions.
    pub fn projective_distance(&self, other: &ProjectivePoint) -> f64 {
        if self.lift.len() != other.lift.len() {
            return f64::INFINITY;
        }
        let (z, w) = (&self.lift, &other.lift);
        let k = (0..z.len())
            .max_by(|&a, &b| z[a].modulus().total_cmp(&z[b].modulus()))
            .expect("non-empty");
        let c = match z[k].inverse() {
            Ok(inv) => inv * w[k],
            Err(_) => return f64::INFINITY,
        };
        let r: f64 = z
            .iter()
            .zip(w)
            .map(|(&a, &b)| (a * c - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        r / vnorm(w)
    }
}

/// `cosh^2(rho/2) = <z,w><w,z> / (<z,z><w,w>)` for two interior points.
pub fn cosh_sq_half_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<f64> {
    for pt in [p, q] {
        if pt.position != Position::Interior {
            return Err(Error::Domain(format!(
                "Bergman distance needs interior points, got {:?}",
                pt.position
            )));
        }
    }
    if p.lift.len() != q.lift.len() {
        return Err(Error::shape(
            format!("lift of length {}", p.lift.len()),
            format!("length {}", q.lift.len()),
        ));
    }
    let zw = form_unchecked(&p.lift, &q.lift);
    let wz = form_unchecked(&q.lift, &p.lift);
    Ok((zw * wz).re() / (p.self_product.re() * q.self_product.re()))
}

/// Bergman distance `rho >= 0`.
pub fn bergman_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<f64> {
    let c = cosh_sq_half_distance(p, q)?;
    Ok(2.0 * c.max(1.0).sqrt().acosh())
}

/// `g . p`, acting on the lift by matrix multiplication.
pub fn apply(g: &SpElement, p: &ProjectivePoint) -> Result<ProjectivePoint> {
    if g.n() != p.n() {
        return Err(Error::shape(
            format!("point in H^{{{},1}}", g.n()),
            format!("H^{{{},1}}", p.n()),
        ));
    }
    ProjectivePoint::new(g.matrix().mul_vec(&p.lift)?)
}
