//! Real quaternions `w + x i + y j + z k`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default tolerance for scalar comparisons.
pub const SCALAR_TOL: f64 = 1e-10;

/// A real quaternion. Multiplication is the (non-commutative) Hamilton product.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// Embeds `a + b i` as a quaternion.
    #[inline]
    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }

    /// Builds `c1 + c2 j` from two complex numbers.
    #[inline]
    pub fn from_complex_pair(c1: Complex64, c2: Complex64) -> Self {
        Self::new(c1.re, c1.im, c2.re, c2.im)
    }

    /// Splits `q = c1 + c2 j` into its complex pair `(c1, c2)`.
    #[inline]
    pub fn complex_pair(self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.w, self.x),
            Complex64::new(self.y, self.z),
        )
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    /// Vector part `(q - conj(q)) / 2`, returned as a pure quaternion.
    #[inline]
    pub fn im(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn modulus(self) -> f64 {
        self.w.hypot(self.x).hypot(self.y.hypot(self.z))
    }

    /// Modulus of the vector part.
    #[inline]
    pub fn im_modulus(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `conj(q) / |q|^2`.
    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Domain("quaternion not invertible".into()));
        }
        Ok(self.conj().scale(1.0 / n))
    }

    /// Unit quaternion in the direction of `self`.
    pub fn normalize(self) -> Result<Self> {
        let m = self.modulus();
        if m == 0.0 {
            return Err(Error::Domain("cannot normalize the zero quaternion".into()));
        }
        Ok(self.scale(1.0 / m))
    }

    /// `q^k` for a non-negative integer exponent.
    pub fn powi(self, k: u32) -> Self {
        let mut acc = Self::ONE;
        let mut base = self;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `q^t` for real `t`, via the polar form. Defined for nonzero `q`.
    pub fn powf(self, t: f64) -> Result<Self> {
        let r = self.modulus();
        if r == 0.0 {
            return Err(Error::Domain("power of the zero quaternion".into()));
        }
        Ok(self.unit_powf(t)?.scale(r.powf(t)))
    }

    /// `(q / |q|)^t`, the unit part raised to a real power.
    pub fn unit_powf(self, t: f64) -> Result<Self> {
        let r = self.modulus();
        if r == 0.0 {
            return Err(Error::Domain("power of the zero quaternion".into()));
        }
        let v = self.im_modulus();
        let angle = v.atan2(self.w);
        let (s, c) = (angle * t).sin_cos();
        if v == 0.0 {
            // real axis: (+1)^t = 1, (-1)^t rotates in the i-plane
            return Ok(Self::new(c, s, 0.0, 0.0));
        }
        let k = s / v;
        Ok(Self::new(c, self.x * k, self.y * k, self.z * k))
    }

    /// Same similarity class: equal real part and equal modulus within `tol`.
    pub fn similar(self, other: Self, tol: f64) -> bool {
        (self.re() - other.re()).abs() <= tol && (self.modulus() - other.modulus()).abs() <= tol
    }

    /// The complex number `Re(q) + |Im(q)| i`, the canonical class representative.
    pub fn class_representative(self) -> Complex64 {
        Complex64::new(self.w, self.im_modulus())
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self.w - other.w)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        self.scale(1.0 / s)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 4]>::deserialize(d)?;
        let q = Quaternion::from_array(a);
        if !q.is_finite() {
            return Err(serde::de::Error::custom("quaternion components must be finite"));
        }
        Ok(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn unit_products() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, -Quaternion::ONE);
        for u in [Quaternion::I, Quaternion::J, Quaternion::K] {
            assert_eq!(u * u, -Quaternion::ONE);
        }
    }

    #[test]
    fn identity_and_hand_products() {
        let a = q(0.3, -1.2, 2.5, 0.7);
        assert_eq!(Quaternion::ONE * a, a);
        assert_eq!(a * Quaternion::ONE, a);
        assert_eq!(q(1.0, 1.0, 0.0, 0.0) * q(1.0, -1.0, 0.0, 0.0), Quaternion::real(2.0));
    }

    #[test]
    fn inverses() {
        assert_eq!(Quaternion::I.inverse().unwrap(), -Quaternion::I);
        assert_eq!(Quaternion::real(2.0).inverse().unwrap(), Quaternion::real(0.5));
        assert_eq!(q(1.0, 1.0, 1.0, 1.0).inverse().unwrap(), q(0.25, -0.25, -0.25, -0.25));
        let err = Quaternion::ZERO.inverse().unwrap_err();
        assert!(err.to_string().contains("quaternion not invertible"));
    }

    #[test]
    fn similarity() {
        assert!(Quaternion::I.similar(Quaternion::J, SCALAR_TOL));
        assert!(q(1.0, 1.0, 0.0, 0.0).similar(q(1.0, -1.0, 0.0, 0.0), SCALAR_TOL));
        // the conjugator exists: j i j^-1 = -i
        let conj = Quaternion::J * q(1.0, 1.0, 0.0, 0.0) * Quaternion::J.inverse().unwrap();
        assert!(conj.max_abs_diff(q(1.0, -1.0, 0.0, 0.0)) < 1e-15);
        assert!(!Quaternion::real(1.0).similar(Quaternion::real(2.0), SCALAR_TOL));
    }

    #[test]
    fn accessors() {
        let a = q(1.0, 2.0, -3.0, 4.0);
        assert_eq!(a.re(), 1.0);
        assert_eq!(a.im(), q(0.0, 2.0, -3.0, 4.0));
        assert_eq!((a - a.conj()).scale(0.5), a.im());
        assert_eq!(a.norm_sqr(), 30.0);
        assert!((a.modulus() - 30f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn powers() {
        let a = q(0.5, 0.2, -0.4, 0.1);
        let p3 = a.powi(3);
        assert!(p3.max_abs_diff(a * a * a) < 1e-15);
        let half = a.powf(0.5).unwrap();
        assert!((half * half).max_abs_diff(a) < 1e-14);
        let neg = Quaternion::real(-2.0).powf(2.0).unwrap();
        assert!(neg.max_abs_diff(Quaternion::real(4.0)) < 1e-14);
        assert_eq!(Quaternion::real(3.0).powi(0), Quaternion::ONE);
    }

    #[test]
    fn complex_pair_roundtrip() {
        let a = q(1.0, 2.0, 3.0, 4.0);
        let (c1, c2) = a.complex_pair();
        assert_eq!(Quaternion::from_complex_pair(c1, c2), a);
        // c2 j = y j + z k
        assert_eq!(Quaternion::from_complex(c2) * Quaternion::J, q(0.0, 0.0, 3.0, 4.0));
    }

    #[test]
    fn json_is_four_array() {
        let a = q(1.0, -0.5, 0.25, 2.0);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[1.0,-0.5,0.25,2.0]");
        let back: Quaternion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Quaternion>("[1,2,3]").is_err());
    }
}
