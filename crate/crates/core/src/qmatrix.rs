//! Dense quaternionic matrices and the complex adjoint.
//!
//! A quaternionic matrix `M = A + B j` (with `A`, `B` complex) is represented
//! faithfully by the `2m x 2m` complex matrix `[[A, B], [-conj(B), conj(A)]]`.
//! Right eigenvalues, generic inverses and null spaces are all computed on
//! that representation and pulled back.

use std::ops::{Index, IndexMut, Mul};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Tolerance used when pairing the conjugate eigenvalues of the complex adjoint.
pub const PAIRING_TOL: f64 = 1e-8;

/// Dense row-major matrix over the quaternions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

impl TryFrom<MatrixJson> for QMatrix {
    type Error = Error;
    fn try_from(m: MatrixJson) -> Result<Self> {
        QMatrix::from_entries(m.rows, m.cols, m.entries)
    }
}

impl From<QMatrix> for MatrixJson {
    fn from(m: QMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries,
        }
    }
}

impl QMatrix {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape("positive dimensions", format!("{rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::shape(
                format!("{} entries", rows * cols),
                format!("{} entries", entries.len()),
            ));
        }
        if entries.iter().any(|q| !q.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::shape("rows of equal length", "ragged rows"));
        }
        Self::from_entries(r, c, rows.into_iter().flatten().collect())
    }

    /// Real matrix lifted entrywise.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().copied().map(Quaternion::real).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![Quaternion::ONE; n])
    }

    pub fn from_diag(d: &[Quaternion]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &q) in d.iter().enumerate() {
            m[(i, i)] = q;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Quaternion>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|v| v.len() != r) {
            return Err(Error::shape("columns of equal length", "ragged columns"));
        }
        let mut m = Self::zeros(r, c);
        for (j, v) in cols.iter().enumerate() {
            for (i, &q) in v.iter().enumerate() {
                m[(i, j)] = q;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    pub fn matmul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::shape(
                format!("{} rows on the right factor", self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let mut acc = Quaternion::ZERO;
                for j in 0..self.cols {
                    acc += self[(i, j)] * other[(j, k)];
                }
                out[(i, k)] = acc;
            }
        }
        Ok(out)
    }

    /// `M v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Quaternion]) -> Result<Vec<Quaternion>> {
        if v.len() != self.cols {
            return Err(Error::shape(
                format!("vector of length {}", self.cols),
                format!("length {}", v.len()),
            ));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Quaternion::ZERO, |acc, j| acc + self[(i, j)] * v[j])
            })
            .collect())
    }

    /// Quaternionic Hermitian transpose.
    pub fn star(&self) -> QMatrix {
        let mut out = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &QMatrix, f: impl Fn(Quaternion, Quaternion) -> Quaternion) -> Result<QMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::shape(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&q| f(q)).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|q| q.modulus()).fold(0.0, f64::max)
    }

    /// Largest entry modulus together with its position.
    pub fn argmax_norm(&self) -> (f64, usize, usize) {
        let mut best = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let m = self[(i, j)].modulus();
                if m > best.0 {
                    best = (m, i, j);
                }
            }
        }
        best
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &QMatrix) -> Result<f64> {
        Ok(self.sub(other)?.max_norm())
    }

    /// Copies rows `r0..r1`, columns `c0..c1`. Empty ranges give a 0-sized matrix.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> QMatrix {
        let rows = r1 - r0;
        let cols = c1 - c0;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in r0..r1 {
            for j in c0..c1 {
                entries.push(self[(i, j)]);
            }
        }
        QMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &QMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn column(&self, j: usize) -> Vec<Quaternion> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Quaternion> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Complex adjoint `[[A, B], [-conj(B), conj(A)]]` of `M = A + B j`.
    pub fn complex_adjoint(&self) -> ComplexAdjoint {
        let (r, c) = (self.rows, self.cols);
        let mut m = DMatrix::<Complex64>::zeros(2 * r, 2 * c);
        for i in 0..r {
            for j in 0..c {
                let (a, b) = self[(i, j)].complex_pair();
                m[(i, j)] = a;
                m[(i, j + c)] = b;
                m[(i + r, j)] = -b.conj();
                m[(i + r, j + c)] = a.conj();
            }
        }
        ComplexAdjoint(m)
    }

    /// Generic inverse through the complex adjoint.
    pub fn inverse_via_adjoint(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::shape("square matrix", format!("{}x{}", self.rows, self.cols)));
        }
        let inv = self
            .complex_adjoint()
            .0
            .try_inverse()
            .ok_or_else(|| Error::numeric("complex adjoint is singular", 0.0))?;
        ComplexAdjoint(inv).to_qmatrix()
    }

    /// One complex representative (imaginary part >= 0) per right-eigenvalue
    /// similarity class, with algebraic multiplicity, sorted by modulus then
    /// argument.
    pub fn right_eigenvalues(&self, tol: f64) -> Result<Vec<Complex64>> {
        if !self.is_square() {
            return Err(Error::shape("square matrix", format!("{}x{}", self.rows, self.cols)));
        }
        let spectrum = self.complex_adjoint().eigenvalues()?;
        let scale = self.max_norm().max(1.0);
        let (reps, worst_gap) = pair_conjugates(&spectrum);
        // defective eigenvalues perturb like eps^(1/k); only a gross mismatch is a failure
        if worst_gap > tol.max(PAIRING_TOL).sqrt() * scale {
            return Err(Error::numeric(
                "complex adjoint spectrum is not closed under conjugation",
                worst_gap,
            ));
        }
        Ok(reps)
    }

    /// Right eigenvalue representatives with an eigenvector for each, such that
    /// `|M v - v lambda| <= tol * max(1, |M|) * |v|`.
    pub fn right_eigenpairs(&self, tol: f64) -> Result<Vec<(Complex64, Vec<Quaternion>)>> {
        let eigs = self.right_eigenvalues(tol)?;
        let scale = self.max_norm().max(1.0);
        let chi = self.complex_adjoint();
        eigs.into_iter()
            .map(|lambda| {
                let v = chi.near_null_vector(lambda);
                let res = eigen_residual(self, &v, Quaternion::from_complex(lambda));
                if res > tol * scale {
                    return Err(Error::numeric(
                        format!("eigenvector for {lambda} has a large residual"),
                        res,
                    ));
                }
                Ok((lambda, v))
            })
            .collect()
    }

    /// A spanning set (possibly redundant over H) of `{v : M v = v lambda}`,
    /// taken from the complex singular vectors of `chi(M) - lambda` whose
    /// singular values are at most `tol * max(1, |M|)`.
    pub fn eigenspace(&self, lambda: Complex64, tol: f64) -> Vec<Vec<Quaternion>> {
        let scale = self.max_norm().max(1.0);
        self.complex_adjoint().null_vectors(lambda, tol * scale)
    }
}

/// `|M v - v lambda| / |v|`.
pub fn eigen_residual(m: &QMatrix, v: &[Quaternion], lambda: Quaternion) -> f64 {
    let mv = m.mul_vec(v).expect("eigenvector length matches matrix");
    let r = mv
        .iter()
        .zip(v)
        .map(|(&a, &b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    r / vnorm(v).max(f64::MIN_POSITIVE)
}

/// Greedy conjugate pairing. Returns class representatives and the largest
/// distance between a value and its partner's conjugate.
fn pair_conjugates(spectrum: &[Complex64]) -> (Vec<Complex64>, f64) {
    let mut remaining: Vec<Complex64> = spectrum.to_vec();
    let mut reps = Vec::with_capacity(spectrum.len() / 2);
    let mut worst = 0.0f64;
    while remaining.len() >= 2 {
        let (top, _) = remaining
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.im.total_cmp(&b.1.im))
            .expect("non-empty");
        let a = remaining.swap_remove(top);
        let target = a.conj();
        let (partner, gap) = remaining
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - target).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty");
        let b = remaining.swap_remove(partner);
        worst = worst.max(gap);
        reps.push(Complex64::new(0.5 * (a.re + b.re), 0.5 * (a.im.abs() + b.im.abs())));
    }
    reps.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    (reps, worst)
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    /// Panics on a shape mismatch; use [`QMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

/// Complex `2m x 2m` representation of a quaternionic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexAdjoint(pub DMatrix<Complex64>);

impl ComplexAdjoint {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Reads back `M = P + Q j` from the top block row `[P, Q]`.
    pub fn to_qmatrix(&self) -> Result<QMatrix> {
        let (r2, c2) = self.0.shape();
        if r2 % 2 != 0 || c2 % 2 != 0 {
            return Err(Error::shape("even dimensions", format!("{r2}x{c2}")));
        }
        let (r, c) = (r2 / 2, c2 / 2);
        let mut out = QMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                out[(i, j)] = Quaternion::from_complex_pair(self.0[(i, j)], self.0[(i, j + c)]);
            }
        }
        Ok(out)
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.dim();
        let schur = nalgebra::linalg::Schur::try_new(self.0.clone(), f64::EPSILON, 10_000 * n.max(1))
            .ok_or_else(|| Error::numeric("complex Schur iteration did not converge", f64::NAN))?;
        let (_, t) = schur.unpack();
        Ok((0..n).map(|i| t[(i, i)]).collect())
    }

    /// Right singular vector of `chi - lambda I` with the smallest singular
    /// value, mapped back to a quaternionic vector.
    pub fn near_null_vector(&self, lambda: Complex64) -> Vec<Quaternion> {
        let (vecs, sv) = self.shifted_svd(lambda);
        let k = (0..sv.len())
            .min_by(|&a, &b| sv[a].total_cmp(&sv[b]))
            .expect("non-empty spectrum");
        complex_to_quaternion_vector(&vecs.column(k).into_owned())
    }

    pub fn null_vectors(&self, lambda: Complex64, threshold: f64) -> Vec<Vec<Quaternion>> {
        let (vecs, sv) = self.shifted_svd(lambda);
        (0..sv.len())
            .filter(|&k| sv[k] <= threshold)
            .map(|k| complex_to_quaternion_vector(&vecs.column(k).into_owned()))
            .collect()
    }

    /// Right singular vectors (as columns) and singular values of `chi - lambda I`.
    fn shifted_svd(&self, lambda: Complex64) -> (DMatrix<Complex64>, Vec<f64>) {
        let n = self.dim();
        let shifted = &self.0 - DMatrix::<Complex64>::identity(n, n) * lambda;
        let svd = shifted.svd(false, true);
        let v = svd.v_t.expect("requested right singular vectors").adjoint();
        (v, svd.singular_values.iter().copied().collect())
    }
}

/// A complex eigenvector `[x; y]` of the adjoint corresponds to the
/// quaternionic right eigenvector `x - conj(y) j` with the same eigenvalue.
fn complex_to_quaternion_vector(v: &DVector<Complex64>) -> Vec<Quaternion> {
    let m = v.len() / 2;
    (0..m)
        .map(|i| Quaternion::from_complex_pair(v[i], -v[i + m].conj()))
        .collect()
}

/// Euclidean norm of a quaternionic vector.
pub fn vnorm(v: &[Quaternion]) -> f64 {
    v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

/// `v q` for a vector `v` and scalar `q` acting on the right.
pub fn vscale_right(v: &[Quaternion], q: Quaternion) -> Vec<Quaternion> {
    v.iter().map(|&a| a * q).collect()
}

/// Standard inner product `sum conj(w_i) z_i`.
pub fn vdot(z: &[Quaternion], w: &[Quaternion]) -> Quaternion {
    z.iter()
        .zip(w)
        .fold(Quaternion::ZERO, |acc, (&a, &b)| acc + b.conj() * a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion as Q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_q(rng: &mut impl Rng) -> Q {
        Q::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )
    }

    fn random_matrix(rng: &mut impl Rng, r: usize, c: usize) -> QMatrix {
        QMatrix::from_entries(r, c, (0..r * c).map(|_| random_q(rng)).collect()).unwrap()
    }

    #[test]
    fn identity_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_matrix(&mut rng, 3, 3);
        assert_eq!(&QMatrix::identity(3) * &m, m);
        assert_eq!(&m * &QMatrix::identity(3), m);
    }

    #[test]
    fn one_by_one_products() {
        let i = QMatrix::from_diag(&[Q::I]);
        let j = QMatrix::from_diag(&[Q::J]);
        assert_eq!(&i * &j, QMatrix::from_diag(&[Q::K]));
        // the transposes of 1x1 matrices are themselves; order still matters
        assert_eq!(&j * &i, QMatrix::from_diag(&[-Q::K]));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = QMatrix::zeros(2, 3);
        let b = QMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::Shape { .. })));
        assert!(QMatrix::from_entries(2, 2, vec![Q::ONE; 3]).is_err());
    }

    #[test]
    fn star_properties() {
        assert_eq!(QMatrix::identity(4).star(), QMatrix::identity(4));
        assert_eq!(QMatrix::from_diag(&[Q::I]).star(), QMatrix::from_diag(&[-Q::I]));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_matrix(&mut rng, 3, 3);
        let n = random_matrix(&mut rng, 3, 3);
        assert_eq!(m.star().star(), m);
        let lhs = (&m * &n).star();
        let rhs = &n.star() * &m.star();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn adjoint_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 3, 3);
            let n = random_matrix(&mut rng, 3, 3);
            let lhs = (&m * &n).complex_adjoint().0;
            let rhs = m.complex_adjoint().0 * n.complex_adjoint().0;
            assert!((lhs - rhs).camax() < 1e-13);
        }
    }

    #[test]
    fn adjoint_roundtrip_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_matrix(&mut rng, 4, 4);
        assert_eq!(m.complex_adjoint().to_qmatrix().unwrap(), m);
        let inv = m.inverse_via_adjoint().unwrap();
        assert!((&m * &inv).max_abs_diff(&QMatrix::identity(4)).unwrap() < 1e-10);
        assert!((&inv * &m).max_abs_diff(&QMatrix::identity(4)).unwrap() < 1e-10);
    }

    #[test]
    fn eigenvalues_of_diagonal_real() {
        let m = QMatrix::from_diag(&[Q::real(2.0), Q::real(0.5)]);
        let e = m.right_eigenvalues(1e-10).unwrap();
        assert_eq!(e.len(), 2);
        assert!((e[0] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((e[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalue_of_i() {
        let m = QMatrix::from_diag(&[Q::I]);
        let pairs = m.right_eigenpairs(1e-10).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].0 - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        // class of j is the same class
        let mj = QMatrix::from_diag(&[Q::J]);
        let ej = mj.right_eigenvalues(1e-10).unwrap();
        assert!((ej[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn conjugated_diagonal_recovers_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = QMatrix::from_diag(&[Q::new(1.0, 1.0, 0.0, 0.0), Q::real(3.0)]);
        for _ in 0..10 {
            let c = random_matrix(&mut rng, 2, 2);
            let cinv = c.inverse_via_adjoint().unwrap();
            let m = &(&c * &d) * &cinv;
            let e = m.right_eigenvalues(1e-10).unwrap();
            assert!((e[0] - Complex64::new(1.0, 1.0)).norm() < 1e-8, "{e:?}");
            assert!((e[1] - Complex64::new(3.0, 0.0)).norm() < 1e-8, "{e:?}");
            for (lambda, v) in m.right_eigenpairs(1e-8).unwrap() {
                assert!(eigen_residual(&m, &v, Q::from_complex(lambda)) < 1e-8);
            }
        }
    }

    #[test]
    fn eigenvector_right_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_matrix(&mut rng, 3, 3);
        for (lambda, v) in m.right_eigenpairs(1e-8).unwrap() {
            let q = random_q(&mut rng);
            let vq = vscale_right(&v, q);
            let t = Q::from_complex(lambda);
            let moved = q.inverse().unwrap() * t * q;
            assert!(eigen_residual(&m, &vq, moved) < 1e-8);
        }
    }

    #[test]
    fn eigenspace_of_identity_block() {
        let m = QMatrix::from_diag(&[Q::ONE, Q::ONE, Q::real(2.0)]);
        let basis = m.eigenspace(Complex64::new(1.0, 0.0), 1e-9);
        assert!(!basis.is_empty());
        for v in &basis {
            assert!(v[2].modulus() < 1e-12);
            assert!(eigen_residual(&m, v, Q::ONE) < 1e-12);
        }
    }

    #[test]
    fn json_format() {
        let m = QMatrix::from_diag(&[Q::I, Q::ONE]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"rows":2,"cols":2,"entries":[[0.0,1.0,0.0,0.0],[0.0,0.0,0.0,0.0],[0.0,0.0,0.0,0.0],[1.0,0.0,0.0,0.0]]}"#
        );
        let back: QMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":2,"cols":2,"entries":[[1,0,0,0]]}"#;
        assert!(serde_json::from_str::<QMatrix>(bad).is_err());
    }
}
