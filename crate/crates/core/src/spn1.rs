//! The Hermitian form of signature (n,1), the group Sp(n,1) and its
//! stabilizer normal forms.
//!
//! Coordinates are 0-based: for an `(n+1) x (n+1)` element the last two
//! indices `n-1` and `n` play the roles of the paired null directions, and the
//! leading `n-1` coordinates carry the positive-definite part. An element is
//! partitioned as
//!
//! ```text
//!     | A      alpha   beta   |
//! g = | gamma  a_nn    a_nn1  |
//!     | theta  a_n1n   a_n1n1 |
//! ```
//!
//! with `A` of size `(n-1) x (n-1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmatrix::{vdot, vnorm, vscale_right, QMatrix};
use crate::quaternion::Quaternion;

/// Default absolute max-norm tolerance for `g* J g = J`.
pub const ADMISSION_TOL: f64 = 1e-9;

/// Tolerance for the algebraic constraints on normal-form parameters.
pub const PARAM_TOL: f64 = 1e-9;

/// The form `<z, w> = w* J z` on `H^{n,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianForm {
    n: usize,
}

impl HermitianForm {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// `J = diag(I_{n-1}, [[0, -1], [-1, 0]])`.
    pub fn matrix(&self) -> QMatrix {
        let d = self.dim();
        let mut j = QMatrix::zeros(d, d);
        for i in 0..d - 2 {
            j[(i, i)] = Quaternion::ONE;
        }
        j[(d - 2, d - 1)] = -Quaternion::ONE;
        j[(d - 1, d - 2)] = -Quaternion::ONE;
        j
    }

    pub fn eval(&self, z: &[Quaternion], w: &[Quaternion]) -> Result<Quaternion> {
        let d = self.dim();
        if z.len() != d || w.len() != d {
            return Err(Error::shape(
                format!("vectors of length {d}"),
                format!("lengths {} and {}", z.len(), w.len()),
            ));
        }
        Ok(form_unchecked(z, w))
    }
}

/// `w* J z` without the length check; both slices have the same length >= 2.
#[inline]
pub(crate) fn form_unchecked(z: &[Quaternion], w: &[Quaternion]) -> Quaternion {
    let d = z.len();
    let mut acc = Quaternion::ZERO;
    for i in 0..d - 2 {
        acc += w[i].conj() * z[i];
    }
    acc - (w[d - 2].conj() * z[d - 1] + w[d - 1].conj() * z[d - 2])
}

/// `<z, w> = w* J z` where `n + 1` is the common vector length.
pub fn herm_form(z: &[Quaternion], w: &[Quaternion]) -> Result<Quaternion> {
    if z.len() < 2 {
        return Err(Error::shape("vectors of length >= 2", format!("length {}", z.len())));
    }
    HermitianForm::new(z.len() - 1)?.eval(z, w)
}

/// Largest entry of `|M* J M - J|`, with its position.
pub fn membership_residual(m: &QMatrix) -> Result<(f64, usize, usize)> {
    if !m.is_square() || m.rows() < 2 {
        return Err(Error::shape(
            "square matrix of size >= 2",
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    let d = m.rows();
    let cols: Vec<Vec<Quaternion>> = (0..d).map(|j| m.column(j)).collect();
    let mut worst = (0.0f64, 0, 0);
    for i in 0..d {
        for j in 0..d {
            // (M* J M)_{ij} = <col_j, col_i>
            let target = match (i, j) {
                _ if i == j && i < d - 2 => 1.0,
                _ if i + j == 2 * d - 3 && i != j => -1.0,
                _ => 0.0,
            };
            let r = (form_unchecked(&cols[j], &cols[i]) - Quaternion::real(target)).modulus();
            if r > worst.0 {
                worst = (r, i, j);
            }
        }
    }
    Ok(worst)
}

/// A matrix admitted into Sp(n,1), with its membership residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementJson", into = "ElementJson")]
pub struct SpElement {
    n: usize,
    m: QMatrix,
    residual: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    n: usize,
    #[serde(flatten)]
    matrix: QMatrix,
    residual: f64,
}

impl TryFrom<ElementJson> for SpElement {
    type Error = Error;
    fn try_from(e: ElementJson) -> Result<Self> {
        if e.matrix.rows() != e.n + 1 {
            return Err(Error::shape(
                format!("{0}x{0} matrix for n = {1}", e.n + 1, e.n),
                format!("{}x{}", e.matrix.rows(), e.matrix.cols()),
            ));
        }
        is_member(&e.matrix, ADMISSION_TOL.max(2.0 * e.residual))
    }
}

impl From<SpElement> for ElementJson {
    fn from(g: SpElement) -> Self {
        ElementJson {
            n: g.n,
            matrix: g.m,
            residual: g.residual,
        }
    }
}

/// Admits `m` iff `|M* J M - J|_max <= tol`.
pub fn is_member(m: &QMatrix, tol: f64) -> Result<SpElement> {
    let (residual, row, col) = membership_residual(m)?;
    if residual.is_nan() || residual > tol {
        return Err(Error::NotMember {
            residual,
            row,
            col,
            tol,
        });
    }
    Ok(SpElement {
        n: m.rows() - 1,
        m: m.clone(),
        residual,
    })
}

impl SpElement {
    /// Wraps a matrix known to be (numerically) in the group, recording its
    /// residual without rejecting. Used for products and conjugates whose
    /// drift is tracked by the caller.
    pub fn from_product(m: QMatrix) -> Result<Self> {
        let (residual, _, _) = membership_residual(&m)?;
        Ok(SpElement {
            n: m.rows() - 1,
            m,
            residual,
        })
    }

    pub fn identity(n: usize) -> Self {
        SpElement {
            n,
            m: QMatrix::identity(n + 1),
            residual: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.m
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn form(&self) -> HermitianForm {
        HermitianForm { n: self.n }
    }

    /// `self * other`, re-measuring the residual.
    pub fn compose(&self, other: &SpElement) -> Result<SpElement> {
        SpElement::from_product(self.m.matmul(&other.m)?)
    }

    /// `self * other * self^{-1}`.
    pub fn conjugate(&self, other: &SpElement) -> Result<SpElement> {
        let inv = self.group_inverse();
        SpElement::from_product(self.m.matmul(&other.m)?.matmul(&inv.m)?)
    }

    /// Whether every off-diagonal entry vanishes within `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.n + 1;
        (0..d).all(|i| (0..d).all(|j| i == j || self.m[(i, j)].modulus() <= tol))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.m
            .max_abs_diff(&QMatrix::identity(self.n + 1))
            .map(|r| r <= tol)
            .unwrap_or(false)
    }

    // Block views. `p = n - 1` is the size of the positive-definite block.

    #[inline]
    fn p(&self) -> usize {
        self.n - 1
    }

    pub fn a_block(&self) -> QMatrix {
        let p = self.p();
        self.m.submatrix(0, p, 0, p)
    }

    pub fn alpha(&self) -> QMatrix {
        let p = self.p();
        self.m.submatrix(0, p, p, p + 1)
    }

    pub fn beta(&self) -> QMatrix {
        let p = self.p();
        self.m.submatrix(0, p, p + 1, p + 2)
    }

    pub fn gamma(&self) -> QMatrix {
        let p = self.p();
        self.m.submatrix(p, p + 1, 0, p)
    }

    pub fn theta(&self) -> QMatrix {
        let p = self.p();
        self.m.submatrix(p + 1, p + 2, 0, p)
    }

    pub fn a_nn(&self) -> Quaternion {
        self.m[(self.n - 1, self.n - 1)]
    }

    pub fn a_nn1(&self) -> Quaternion {
        self.m[(self.n - 1, self.n)]
    }

    pub fn a_n1n(&self) -> Quaternion {
        self.m[(self.n, self.n - 1)]
    }

    pub fn a_n1n1(&self) -> Quaternion {
        self.m[(self.n, self.n)]
    }

    /// `J g* J`, assembled blockwise:
    ///
    /// ```text
    /// | A*       -theta*   -gamma*   |
    /// | -beta*   ~a_n1n1    ~a_nn1   |
    /// | -alpha*  ~a_n1n     ~a_nn    |
    /// ```
    ///
    /// where `~` is quaternion conjugation.
    pub fn group_inverse(&self) -> SpElement {
        let p = self.p();
        let d = self.n + 1;
        let mut inv = QMatrix::zeros(d, d);
        inv.set_submatrix(0, 0, &self.a_block().star());
        inv.set_submatrix(0, p, &self.theta().star().map(|q| -q));
        inv.set_submatrix(0, p + 1, &self.gamma().star().map(|q| -q));
        inv.set_submatrix(p, 0, &self.beta().star().map(|q| -q));
        inv.set_submatrix(p + 1, 0, &self.alpha().star().map(|q| -q));
        inv[(p, p)] = self.a_n1n1().conj();
        inv[(p, p + 1)] = self.a_nn1().conj();
        inv[(p + 1, p)] = self.a_n1n().conj();
        inv[(p + 1, p + 1)] = self.a_nn().conj();
        SpElement {
            n: self.n,
            m: inv,
            residual: self.residual,
        }
    }

    /// Max-norm residuals of the defining relation and of the twelve block
    /// identities that follow from `g g^{-1} = g^{-1} g = I`, in the order of
    /// [`IDENTITY_LABELS`].
    pub fn identity_residuals(&self) -> [f64; 13] {
        let a = self.a_block();
        let (al, be, ga, th) = (self.alpha(), self.beta(), self.gamma(), self.theta());
        let (nn, nn1, n1n, n1n1) = (self.a_nn(), self.a_nn1(), self.a_n1n(), self.a_n1n1());
        let p = self.p();
        let eye = QMatrix::identity(p);

        let mm = |x: &QMatrix, y: &QMatrix| x.matmul(y).expect("block shapes agree");
        let sc = |x: &QMatrix, q: Quaternion| x.map(|e| e * q);
        let norm = |x: QMatrix| x.max_norm();
        let scal = |x: &QMatrix| if x.rows() == 0 { Quaternion::ZERO } else { x[(0, 0)] };
        let add = |x: &QMatrix, y: &QMatrix| x.add(y).expect("block shapes agree");
        let sub = |x: &QMatrix, y: &QMatrix| x.sub(y).expect("block shapes agree");

        let membership = membership_residual(&self.m).map(|r| r.0).unwrap_or(f64::NAN);
        // g g^{-1} = I
        let r_aa = norm(sub(
            &sub(&sub(&mm(&a, &a.star()), &mm(&al, &be.star())), &mm(&be, &al.star())),
            &eye,
        ));
        let r_at = norm(add(
            &add(&mm(&a, &th.star()).map(|q| -q), &sc(&al, n1n1.conj())),
            &sc(&be, n1n.conj()),
        ));
        let r_ag = norm(add(
            &add(&mm(&a, &ga.star()).map(|q| -q), &sc(&al, nn1.conj())),
            &sc(&be, nn.conj()),
        ));
        let r_gt = (-scal(&mm(&ga, &th.star())) + nn * n1n1.conj() + nn1 * n1n.conj()
            - Quaternion::ONE)
            .modulus();
        let r_gg = (-scal(&mm(&ga, &ga.star())) + nn * nn1.conj() + nn1 * nn.conj()).modulus();
        let r_tt =
            (-scal(&mm(&th, &th.star())) + n1n * n1n1.conj() + n1n1 * n1n.conj()).modulus();
        // g^{-1} g = I
        let r_aa2 = norm(sub(
            &sub(&sub(&mm(&a.star(), &a), &mm(&th.star(), &ga)), &mm(&ga.star(), &th)),
            &eye,
        ));
        let r_aal = norm(sub(
            &sub(&mm(&a.star(), &al), &sc(&th.star(), nn)),
            &sc(&ga.star(), n1n),
        ));
        let r_abe = norm(sub(
            &sub(&mm(&a.star(), &be), &sc(&th.star(), nn1)),
            &sc(&ga.star(), n1n1),
        ));
        let r_ba = (-scal(&mm(&be.star(), &al)) + n1n1.conj() * nn + nn1.conj() * n1n
            - Quaternion::ONE)
            .modulus();
        let r_bb = (-scal(&mm(&be.star(), &be)) + n1n1.conj() * nn1 + nn1.conj() * n1n1).modulus();
        let r_al = (-scal(&mm(&al.star(), &al)) + n1n.conj() * nn + nn.conj() * n1n).modulus();
        [
            membership, r_aa, r_at, r_ag, r_gt, r_gg, r_tt, r_aa2, r_aal, r_abe, r_ba, r_bb, r_al,
        ]
    }
}

/// Names of the entries returned by [`SpElement::identity_residuals`].
pub const IDENTITY_LABELS: [&str; 13] = [
    "g*Jg = J",
    "AA* - alpha beta* - beta alpha* = I",
    "-A theta* + alpha ~a_n1n1 + beta ~a_n1n = 0",
    "-A gamma* + alpha ~a_nn1 + beta ~a_nn = 0",
    "-gamma theta* + a_nn ~a_n1n1 + a_nn1 ~a_n1n = 1",
    "-gamma gamma* + a_nn ~a_nn1 + a_nn1 ~a_nn = 0",
    "-theta theta* + a_n1n ~a_n1n1 + a_n1n1 ~a_n1n = 0",
    "A*A - theta* gamma - gamma* theta = I",
    "A* alpha - theta* a_nn - gamma* a_n1n = 0",
    "A* beta - theta* a_nn1 - gamma* a_n1n1 = 0",
    "-beta* alpha + ~a_n1n1 a_nn + ~a_nn1 a_n1n = 1",
    "-beta* beta + ~a_n1n1 a_nn1 + ~a_nn1 a_n1n1 = 0",
    "-alpha* alpha + ~a_n1n a_nn + ~a_nn a_n1n = 0",
];

/// Which stabilizer the normal form belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormKind {
    /// Fixes `q_inf`: `[[A, 0, a], [b, lambda, s], [0, 0, mu]]`.
    StabInfinity,
    /// Fixes `q_0`: `[[A, a, 0], [0, mu, 0], [b, s, lambda]]`.
    StabZero,
    /// Fixes both: `diag(A, lambda, mu)`.
    StabBoth,
}

/// Parameters of a stabilizer normal form. `b = lambda a* A` is derived.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormParams {
    pub kind: NormalFormKind,
    /// `(n-1) x (n-1)` unitary block.
    pub unitary: QMatrix,
    /// Column of length `n - 1`; ignored for `StabBoth`.
    pub a: Vec<Quaternion>,
    pub lambda: Quaternion,
    pub mu: Quaternion,
    /// Ignored for `StabBoth`.
    pub s: Quaternion,
}

impl NormalFormParams {
    /// `diag(A, lambda, mu)` parameters.
    pub fn stab_both(unitary: QMatrix, lambda: Quaternion, mu: Quaternion) -> Self {
        Self {
            kind: NormalFormKind::StabBoth,
            a: vec![Quaternion::ZERO; unitary.rows()],
            unitary,
            lambda,
            mu,
            s: Quaternion::ZERO,
        }
    }

    pub fn n(&self) -> usize {
        self.unitary.rows() + 1
    }

    /// Checks the constraints, naming the first one violated.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let p = self.unitary.rows();
        if !self.unitary.is_square() {
            return Err(Error::Parameter("unitary block must be square".into()));
        }
        if self.a.len() != p {
            return Err(Error::Parameter(format!(
                "column a must have length {p}, got {}",
                self.a.len()
            )));
        }
        let pairing = (self.mu.conj() * self.lambda - Quaternion::ONE).modulus();
        if pairing > tol {
            return Err(Error::Parameter(format!(
                "constraint conj(mu) lambda = 1 violated by {pairing:e}"
            )));
        }
        if p > 0 {
            let defect = self
                .unitary
                .star()
                .matmul(&self.unitary)?
                .max_abs_diff(&QMatrix::identity(p))?;
            if defect > tol {
                return Err(Error::Parameter(format!(
                    "unitary block violates A*A = I by {defect:e}"
                )));
            }
        }
        if self.kind != NormalFormKind::StabBoth {
            let half_a2 = 0.5 * vnorm(&self.a).powi(2);
            let gap = ((self.mu.conj() * self.s).re() - half_a2).abs();
            if gap > tol * half_a2.max(1.0) {
                return Err(Error::Parameter(format!(
                    "constraint Re(conj(mu) s) = |a|^2/2 violated by {gap:e}"
                )));
            }
        }
        Ok(())
    }
}

/// Assembles a stabilizer normal form and admits it.
pub fn make_normal_form(p: &NormalFormParams) -> Result<SpElement> {
    p.validate(PARAM_TOL)?;
    let m = assemble_normal_form(p)?;
    let scale = m.max_norm().max(1.0);
    is_member(&m, ADMISSION_TOL * scale * scale)
}

fn assemble_normal_form(p: &NormalFormParams) -> Result<QMatrix> {
    let q = p.unitary.rows();
    let d = q + 2;
    let mut m = QMatrix::zeros(d, d);
    m.set_submatrix(0, 0, &p.unitary);
    let a_col = QMatrix::from_columns(std::slice::from_ref(&p.a)).unwrap_or_else(|_| QMatrix::zeros(0, 1));
    let a_col = if q == 0 { QMatrix::zeros(0, 1) } else { a_col };
    // b = lambda a* A, a row of length q
    let b = a_col.star().matmul(&p.unitary)?.map(|e| p.lambda * e);
    match p.kind {
        NormalFormKind::StabInfinity => {
            m.set_submatrix(0, q + 1, &a_col);
            m.set_submatrix(q, 0, &b);
            m[(q, q)] = p.lambda;
            m[(q, q + 1)] = p.s;
            m[(q + 1, q + 1)] = p.mu;
        }
        NormalFormKind::StabZero => {
            m.set_submatrix(0, q, &a_col);
            m[(q, q)] = p.mu;
            m.set_submatrix(q + 1, 0, &b);
            m[(q + 1, q)] = p.s;
            m[(q + 1, q + 1)] = p.lambda;
        }
        NormalFormKind::StabBoth => {
            m[(q, q)] = p.lambda;
            m[(q + 1, q + 1)] = p.mu;
        }
    }
    Ok(m)
}

/// `diag(u_1, ..., u_{n-1}, lambda_n, conj(lambda_n)^{-1})`.
pub fn make_loxodromic(unit_eigs: &[Quaternion], lambda_n: Quaternion) -> Result<SpElement> {
    for (i, u) in unit_eigs.iter().enumerate() {
        if (u.modulus() - 1.0).abs() > PARAM_TOL {
            return Err(Error::Parameter(format!(
                "unit eigenvalue {i} has modulus {}",
                u.modulus()
            )));
        }
    }
    if (lambda_n.modulus() - 1.0).abs() <= PARAM_TOL {
        return Err(Error::Parameter("not loxodromic: |lambda_n| = 1".into()));
    }
    let partner = lambda_n.conj().inverse()?;
    let mut d = unit_eigs.to_vec();
    d.push(lambda_n);
    d.push(partner);
    is_member(&QMatrix::from_diag(&d), ADMISSION_TOL)
}

/// The generator stream used for every seeded computation: ChaCha8 keyed by
/// `seed`, on stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_quaternion(rng: &mut impl Rng) -> Quaternion {
    Quaternion::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// Uniform on the unit sphere `S^3`.
pub fn random_unit_quaternion(rng: &mut impl Rng) -> Quaternion {
    loop {
        let q = random_quaternion(rng);
        if q.modulus() > 1e-6 {
            return q.normalize().expect("nonzero");
        }
    }
}

pub fn random_pure_imaginary(rng: &mut impl Rng) -> Quaternion {
    random_quaternion(rng).im()
}

/// Random `m x m` quaternionic unitary: Gram-Schmidt on random columns,
/// applied twice.
pub fn random_unitary(m: usize, rng: &mut impl Rng) -> QMatrix {
    if m == 0 {
        return QMatrix::zeros(0, 0);
    }
    loop {
        let cols: Vec<Vec<Quaternion>> = (0..m)
            .map(|_| (0..m).map(|_| random_quaternion(rng)).collect())
            .collect();
        if let Some(q) = orthonormalize(&cols).and_then(|c| orthonormalize(&c)) {
            return QMatrix::from_columns(&q).expect("square");
        }
    }
}

/// Modified Gram-Schmidt for the standard inner product with right-scalar
/// coefficients. `None` when the columns are numerically dependent.
fn orthonormalize(cols: &[Vec<Quaternion>]) -> Option<Vec<Vec<Quaternion>>> {
    let mut out: Vec<Vec<Quaternion>> = Vec::with_capacity(cols.len());
    for c in cols {
        let mut v = c.clone();
        for e in &out {
            let coef = vdot(&v, e);
            for (vi, &ei) in v.iter_mut().zip(e) {
                *vi -= ei * coef;
            }
        }
        let nrm = vnorm(&v);
        if nrm < 1e-8 {
            return None;
        }
        out.push(vscale_right(&v, Quaternion::real(1.0 / nrm)));
    }
    Some(out)
}

/// Distributions for the random normal-form generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Bounds for `|lambda|` in loxodromic factors (log-uniform).
    pub lox_modulus: (f64, f64),
    /// Standard deviation of each real component of `a` and of the pure
    /// imaginary part of `s`.
    pub translation_sigma: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            lox_modulus: (1.01, 2.0),
            translation_sigma: 0.25,
        }
    }
}

/// Draws one normal-form generator.
///
/// * kind uniform over the three stabilizers;
/// * `StabBoth`: `lambda = r u` with `u` uniform on `S^3` and `ln r` uniform on
///   `ln cfg.lox_modulus`, inverted with probability 1/2;
/// * `StabInfinity` / `StabZero`: `lambda` uniform on `S^3`, `a` normal with
///   component deviation `cfg.translation_sigma`, `s = lambda (|a|^2/2 + p)`
///   with `p` a pure imaginary of the same deviation;
/// * `mu = conj(lambda)^{-1}` and `A` a random unitary in every case.
pub fn random_normal_form_params(
    n: usize,
    cfg: &SamplerConfig,
    rng: &mut impl Rng,
) -> NormalFormParams {
    let p = n - 1;
    let unitary = random_unitary(p, rng);
    let kind = match rng.random_range(0..3u8) {
        0 => NormalFormKind::StabInfinity,
        1 => NormalFormKind::StabZero,
        _ => NormalFormKind::StabBoth,
    };
    let dir = random_unit_quaternion(rng);
    let lambda = match kind {
        NormalFormKind::StabBoth => {
            let (lo, hi) = cfg.lox_modulus;
            let mut r = rng.random_range(lo.ln()..hi.ln()).exp();
            if rng.random_bool(0.5) {
                r = r.recip();
            }
            dir.scale(r)
        }
        _ => dir,
    };
    let mu = lambda.conj().inverse().expect("nonzero");
    let (a, s) = match kind {
        NormalFormKind::StabBoth => (vec![Quaternion::ZERO; p], Quaternion::ZERO),
        _ => {
            let sigma = cfg.translation_sigma;
            let a: Vec<Quaternion> = (0..p).map(|_| random_quaternion(rng).scale(sigma)).collect();
            let half = 0.5 * vnorm(&a).powi(2);
            let s = lambda * (Quaternion::real(half) + random_pure_imaginary(rng).scale(sigma));
            (a, s)
        }
    };
    NormalFormParams {
        kind,
        unitary,
        a,
        lambda,
        mu,
        s,
    }
}

/// Product of `word_length` random normal-form generators drawn from `rng`.
pub fn random_element(n: usize, rng: &mut impl Rng, word_length: usize) -> Result<SpElement> {
    random_element_with(n, &SamplerConfig::default(), rng, word_length)
}

/// [`random_element`] with explicit generator distributions.
pub fn random_element_with(
    n: usize,
    cfg: &SamplerConfig,
    rng: &mut impl Rng,
    word_length: usize,
) -> Result<SpElement> {
    if n == 0 || word_length == 0 {
        return Err(Error::Parameter("n and word length must be at least 1".into()));
    }
    let mut acc = QMatrix::identity(n + 1);
    for _ in 0..word_length {
        let params = random_normal_form_params(n, cfg, rng);
        let factor = assemble_normal_form(&params)?;
        acc = acc.matmul(&factor)?;
    }
    is_member(&acc, ADMISSION_TOL)
}

/// [`random_element`] on the generator `stream_rng(seed, 0)`.
pub fn random_element_seeded(n: usize, seed: u64, word_length: usize) -> Result<SpElement> {
    random_element(n, &mut stream_rng(seed, 0), word_length)
}

/// `P_inf P_0`: one `StabInfinity` and one `StabZero` factor with `A = I`,
/// unit `lambda` near 1 and translations, all of size about `size`. Both
/// off-diagonal corners of the product are nonzero, and the corner product
/// scales like `size^2`.
pub fn random_perturbation(n: usize, size: f64, rng: &mut impl Rng) -> Result<SpElement> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let p = n - 1;
    let mut factor = |kind| -> Result<SpElement> {
        let lambda = (Quaternion::ONE + random_pure_imaginary(rng).scale(size)).normalize()?;
        let a: Vec<Quaternion> = (0..p).map(|_| random_quaternion(rng).scale(size)).collect();
        let half = 0.5 * vnorm(&a).powi(2);
        let s = lambda * (Quaternion::real(half) + random_pure_imaginary(rng).scale(size));
        make_normal_form(&NormalFormParams {
            kind,
            unitary: QMatrix::identity(p),
            a,
            lambda,
            mu: lambda,
            s,
        })
    };
    let a = factor(NormalFormKind::StabInfinity)?;
    let b = factor(NormalFormKind::StabZero)?;
    a.compose(&b)
}
