//! Classification of isometries and the loxodromic invariants `delta(g)` and
//! `M_g`.
//!
//! Right eigenvalues come from the complex adjoint; every class is reported by
//! its complex representative with non-negative imaginary part. A loxodromic
//! `g` is put in diagonal form `c^{-1} g c = diag(L, lambda_n, lambda_{n+1})`
//! by a conjugator built from its eigenvectors: the attracting and repelling
//! null eigenvectors become the last two columns, and the unit block is
//! diagonalized inside their positive-definite orthogonal complement.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Position, ProjectivePoint};
use crate::qmatrix::{eigen_residual, vnorm, vscale_right, QMatrix};
use crate::quaternion::Quaternion;
use crate::spn1::{form_unchecked, is_member, SpElement};

/// Default tolerance for deciding `|lambda| = 1`.
pub const UNIT_TOL: f64 = 1e-7;

/// Relative tolerance for admitting a computed conjugator.
pub const CONJUGATOR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Elliptic,
    Parabolic,
    Loxodromic,
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kind: Kind,
    /// Class representatives, ascending by modulus.
    pub eigs: Vec<Complex64>,
    pub eig_moduli: Vec<f64>,
    /// 2 for loxodromic, 1 for parabolic; not determined otherwise.
    pub boundary_fixed_points: Option<usize>,
    /// Smallest eigenvalue of the form restricted to the eigenspaces, when
    /// the spectrum is unit.
    pub min_form_eigenvalue: Option<f64>,
    /// Parabolic verdict reached with a form eigenvalue within tolerance of 0
    /// but not of rounding size.
    pub low_confidence: bool,
}

/// Threshold for `| |lambda| - 1 |`. Defective unit eigenvalues (parabolics)
/// are perturbed by roughly `(eps |g|)^{1/3}`, which can exceed `tol`.
fn unit_threshold(g: &SpElement, tol: f64) -> f64 {
    let scale = g.matrix().max_norm().max(1.0);
    tol.max(8.0 * (f64::EPSILON * scale).cbrt())
}

pub fn classify(g: &SpElement, tol: f64) -> Result<Classification> {
    let eigs = g.matrix().right_eigenvalues(tol)?;
    let eig_moduli: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    let mut out = Classification {
        kind: Kind::Identity,
        eigs,
        eig_moduli,
        boundary_fixed_points: None,
        min_form_eigenvalue: None,
        low_confidence: false,
    };
    if g.is_identity(tol) {
        return Ok(out);
    }
    let thr = unit_threshold(g, tol);
    let max_mod = out.eig_moduli.iter().copied().fold(0.0, f64::max);
    if max_mod > 1.0 + thr {
        out.kind = Kind::Loxodromic;
        out.boundary_fixed_points = Some(2);
        return Ok(out);
    }
    let scale = g.matrix().max_norm().max(1.0);
    let null_thr = tol.max(1e-12).sqrt() * scale;
    let mut min_eig = f64::INFINITY;
    for &lambda in &out.eigs {
        let vecs = g.matrix().complex_adjoint().null_vectors(lambda, null_thr);
        if let Some(e) = min_form_eigenvalue(&vecs) {
            min_eig = min_eig.min(e);
        }
    }
    out.min_form_eigenvalue = Some(min_eig);
    let noise = 100.0 * f64::EPSILON * scale * scale;
    if min_eig < -tol {
        out.kind = Kind::Elliptic;
    } else {
        out.kind = Kind::Parabolic;
        out.boundary_fixed_points = Some(1);
        out.low_confidence = min_eig < -noise;
    }
    Ok(out)
}

/// Smallest eigenvalue of `<v, v>` on the complex span of the (normalized)
/// vectors. Eigenvectors for one complex representative combine with complex
/// right coefficients, on which the form reduces to the complex part of the
/// quaternionic Gram matrix.
fn min_form_eigenvalue(vecs: &[Vec<Quaternion>]) -> Option<f64> {
    if vecs.is_empty() {
        return None;
    }
    let unit: Vec<Vec<Quaternion>> = vecs
        .iter()
        .map(|v| vscale_right(v, Quaternion::real(1.0 / vnorm(v))))
        .collect();
    let m = unit.len();
    let gram = DMatrix::<Complex64>::from_fn(m, m, |i, j| {
        form_unchecked(&unit[j], &unit[i]).complex_pair().0
    });
    let herm = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    Some(herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Loxodromic invariants and fixed points.
#[derive(Debug, Clone, PartialEq)]
pub struct LoxodromicData {
    /// The `n - 1` unit-modulus classes.
    pub unit_eigs: Vec<Complex64>,
    /// `|lambda_n| > 1`.
    pub lambda_n: Complex64,
    /// Class of `conj(lambda_n)^{-1}`, modulus `1 / |lambda_n|`.
    pub lambda_n1: Complex64,
    /// Attracting fixed point, eigenvector of `lambda_n`.
    pub u: ProjectivePoint,
    /// Repelling fixed point, eigenvector of `lambda_n1`.
    pub v: ProjectivePoint,
    pub delta: f64,
    pub mg: f64,
    /// `c` with `c^{-1} g c` diagonal, when it could be built and admitted.
    pub conjugator: Option<SpElement>,
    /// Diagonal of `c^{-1} g c`.
    pub diagonal: Option<Vec<Quaternion>>,
    /// Largest off-diagonal entry of `c^{-1} g c`.
    pub diagonal_residual: Option<f64>,
}

/// `max |lambda_i - 1|` over the unit classes, 0 when there are none.
pub fn delta(unit_eigs: &[Complex64]) -> f64 {
    unit_eigs
        .iter()
        .map(|&z| (z - 1.0).norm())
        .fold(0.0, f64::max)
}

/// `2 delta + |lambda_n - 1| + |lambda_n1 - 1|`.
pub fn mg(unit_eigs: &[Complex64], lambda_n: Complex64, lambda_n1: Complex64) -> f64 {
    2.0 * delta(unit_eigs) + (lambda_n - 1.0).norm() + (lambda_n1 - 1.0).norm()
}

pub fn loxodromic_data(g: &SpElement, tol: f64) -> Result<LoxodromicData> {
    let mut eigs = g.matrix().right_eigenvalues(tol)?;
    let thr = unit_threshold(g, tol);
    let off: Vec<usize> = (0..eigs.len())
        .filter(|&i| (eigs[i].norm() - 1.0).abs() > thr)
        .collect();
    if off.len() != 2 {
        return Err(Error::Classification(format!(
            "not loxodromic: expected one pair of classes off the unit circle, found {}",
            off.len()
        )));
    }
    eigs.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    let lambda_n1 = eigs[0];
    let lambda_n = eigs[eigs.len() - 1];
    if lambda_n.norm() <= 1.0 || lambda_n1.norm() >= 1.0 {
        return Err(Error::Classification(
            "not loxodromic: off-circle classes are not a reciprocal pair".into(),
        ));
    }
    let unit_eigs = eigs[1..eigs.len() - 1].to_vec();

    let scale = g.matrix().max_norm().max(1.0);
    let chi = g.matrix().complex_adjoint();
    let fixed_point = |lambda: Complex64| -> Result<Vec<Quaternion>> {
        let w = chi.near_null_vector(lambda);
        let res = eigen_residual(g.matrix(), &w, Quaternion::from_complex(lambda));
        if res > tol * scale {
            return Err(Error::numeric(
                format!("fixed-point eigenvector for {lambda} has a large residual"),
                res,
            ));
        }
        Ok(w)
    };
    let u_lift = fixed_point(lambda_n)?;
    let v_lift = fixed_point(lambda_n1)?;
    let u = ProjectivePoint::new(u_lift.clone())?;
    let v = ProjectivePoint::new(v_lift.clone())?;
    for (name, p) in [("attracting", &u), ("repelling", &v)] {
        if p.position() != Position::Boundary {
            let r = p.self_product().re() / vnorm(p.lift()).powi(2);
            return Err(Error::numeric(
                format!("{name} fixed point is not null ({:?})", p.position()),
                r,
            ));
        }
    }

    let mut data = LoxodromicData {
        delta: delta(&unit_eigs),
        mg: mg(&unit_eigs, lambda_n, lambda_n1),
        unit_eigs,
        lambda_n,
        lambda_n1,
        u,
        v,
        conjugator: None,
        diagonal: None,
        diagonal_residual: None,
    };
    if let Ok(c) = diagonalizing_conjugator(g, &u_lift, &v_lift, tol) {
        let d = c.group_inverse().matrix().matmul(g.matrix())?.matmul(c.matrix())?;
        let dim = g.n() + 1;
        let diag: Vec<Quaternion> = (0..dim).map(|i| d[(i, i)]).collect();
        let off = d.max_abs_diff(&QMatrix::from_diag(&diag))?;
        data.conjugator = Some(c);
        data.diagonal = Some(diag);
        data.diagonal_residual = Some(off);
    }
    Ok(data)
}

/// Builds `c = [f_1, ..., f_{n-1}, u', v']` with `c^{-1} g c` diagonal.
fn diagonalizing_conjugator(
    g: &SpElement,
    u: &[Quaternion],
    v: &[Quaternion],
    tol: f64,
) -> Result<SpElement> {
    let n = g.n();
    let dim = n + 1;
    let m = g.matrix();
    if g.is_diagonal(0.0) && m[(n - 1, n - 1)].modulus() > 1.0 {
        return Ok(SpElement::identity(n));
    }
    // normalize <u', v'> = -1 with |u'| = |v'|
    let p = form_unchecked(u, v);
    let v = vscale_right(v, -(p.conj().inverse()?));
    let t = (vnorm(&v) / vnorm(u)).sqrt();
    let u = vscale_right(u, Quaternion::real(t));
    let v = vscale_right(&v, Quaternion::real(1.0 / t));

    // orthogonal complement of span{u, v}, positive definite
    let project = |x: &[Quaternion]| -> Vec<Quaternion> {
        let a = form_unchecked(x, &v);
        let b = form_unchecked(x, &u);
        (0..dim).map(|i| x[i] + u[i] * a + v[i] * b).collect()
    };
    let candidates: Vec<Vec<Quaternion>> = (0..dim)
        .map(|i| {
            let mut e = vec![Quaternion::ZERO; dim];
            e[i] = Quaternion::ONE;
            project(&e)
        })
        .collect();
    let mut basis = positive_orthonormalize(candidates, n - 1);

    let mut cols = Vec::with_capacity(dim);
    while !basis.is_empty() {
        let k = basis.len();
        let mut block = QMatrix::zeros(k, k);
        let images: Vec<Vec<Quaternion>> = basis
            .iter()
            .map(|f| m.mul_vec(f))
            .collect::<Result<_>>()?;
        for a in 0..k {
            for b in 0..k {
                block[(a, b)] = form_unchecked(&images[b], &basis[a]);
            }
        }
        let x = block.complex_adjoint().near_null_vector(
            *block
                .right_eigenvalues(tol)?
                .first()
                .expect("non-empty block"),
        );
        let mut f = vec![Quaternion::ZERO; dim];
        for (a, fa) in basis.iter().enumerate() {
            for i in 0..dim {
                f[i] += fa[i] * x[a];
            }
        }
        let f = form_normalize(&f);
        let rest: Vec<Vec<Quaternion>> = basis
            .iter()
            .map(|fa| {
                let c = form_unchecked(fa, &f);
                (0..dim).map(|i| fa[i] - f[i] * c).collect()
            })
            .collect();
        cols.push(f);
        basis = positive_orthonormalize(rest, k - 1);
    }
    cols.push(u);
    cols.push(v);
    let c = QMatrix::from_columns(&cols)?;
    let scale = c.max_norm().max(1.0);
    is_member(&c, CONJUGATOR_TOL * scale * scale)
}

fn form_normalize(x: &[Quaternion]) -> Vec<Quaternion> {
    let r = form_unchecked(x, x).re().sqrt();
    vscale_right(x, Quaternion::real(1.0 / r))
}

/// Greedy Gram-Schmidt for the form on a positive-definite subspace, keeping
/// the `keep` candidates with the largest remaining form norm.
fn positive_orthonormalize(mut cand: Vec<Vec<Quaternion>>, keep: usize) -> Vec<Vec<Quaternion>> {
    let mut out: Vec<Vec<Quaternion>> = Vec::with_capacity(keep);
    while out.len() < keep {
        let (best, _) = cand
            .iter()
            .enumerate()
            .map(|(i, x)| (i, form_unchecked(x, x).re()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("enough candidates");
        let f = form_normalize(&cand.swap_remove(best));
        for x in cand.iter_mut() {
            let c = form_unchecked(x, &f);
            for i in 0..x.len() {
                x[i] -= f[i] * c;
            }
        }
        out.push(f);
    }
    out
}

/// Serializable summary of a classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub kind: Kind,
    pub eigs: Vec<[f64; 2]>,
    pub delta: Option<f64>,
    pub mg: Option<f64>,
    pub u: Option<ProjectivePoint>,
    pub v: Option<ProjectivePoint>,
    pub low_confidence: bool,
}

pub fn spectral_report(g: &SpElement, tol: f64) -> Result<SpectralReport> {
    let c = classify(g, tol)?;
    let mut report = SpectralReport {
        kind: c.kind,
        eigs: c.eigs.iter().map(|z| [z.re, z.im]).collect(),
        delta: None,
        mg: None,
        u: None,
        v: None,
        low_confidence: c.low_confidence,
    };
    if c.kind == Kind::Loxodromic {
        let d = loxodromic_data(g, tol)?;
        report.delta = Some(d.delta);
        report.mg = Some(d.mg);
        report.u = Some(d.u);
        report.v = Some(d.v);
    }
    Ok(report)
}
