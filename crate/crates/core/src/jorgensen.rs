//! Jørgensen-type test for a loxodromic `g` and an arbitrary `h`, and the
//! conjugation orbit `h_{k+1} = h_k g h_k^{-1}` behind it.
//!
//! All corner quantities are read in the frame where `g` is diagonal: with
//! `c^{-1} g c = D`, the pair `(g, h)` is replaced by `(D, c^{-1} h c)`, which
//! moves the attracting fixed point to `q_inf` and the repelling one to `q_0`.
//! Corner products are `pi = |a_{n,n+1} a_{n+1,n}|` (off) and
//! `|a_{n,n} a_{n+1,n+1}|` (diagonal).
//!
//! The outcomes are certificates, never discreteness proofs:
//! `ConditionHolds` and the two degenerate verdicts say the group is
//! elementary or not discrete; `Inconclusive` says nothing.

use serde::{Deserialize, Serialize};

use crate::crossratio::cross_ratio;
use crate::error::{Error, Result};
use crate::geometry::{apply, ProjectivePoint};
use crate::qmatrix::QMatrix;
use crate::quaternion::Quaternion;
use crate::spectral::{classify, loxodromic_data, Kind, LoxodromicData, UNIT_TOL};
use crate::spn1::SpElement;

/// `pi_1` below this counts as zero for the degenerate routing.
pub const PI_ZERO_TOL: f64 = 1e-24;
/// Projective residual under which a point counts as fixed.
pub const FIX_TOL: f64 = 1e-10;
/// Default orbit length.
pub const DEFAULT_STEPS: usize = 64;
/// Relative slack and absolute floor on `sqrt(pi)` for the decay bounds.
pub const BOUND_SLACK: f64 = 1e-6;
pub const BOUND_FLOOR: f64 = 1e-28;
/// Relative membership tolerance for orbit elements.
pub const ORBIT_MEMBER_TOL: f64 = 1e-6;
/// Convergence threshold for the `f_k` report.
pub const FK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "ConditionHolds_ElementaryOrNonDiscrete")]
    ConditionHolds,
    Inconclusive,
    #[serde(rename = "Degenerate_Elementary")]
    DegenerateElementary,
    #[serde(rename = "Degenerate_NonDiscrete_SharedFixedPoint")]
    DegenerateSharedFixedPoint,
}

/// `g` in diagonal form.
#[derive(Debug, Clone)]
pub struct Frame {
    pub data: LoxodromicData,
    pub conjugator: SpElement,
    pub diagonal: Vec<Quaternion>,
}

impl Frame {
    pub fn new(g: &SpElement) -> Result<Self> {
        let data = loxodromic_data(g, UNIT_TOL)?;
        let (Some(c), Some(d)) = (data.conjugator.clone(), data.diagonal.clone()) else {
            return Err(Error::numeric(
                "could not admit a diagonalizing conjugator",
                f64::NAN,
            ));
        };
        Ok(Self {
            data,
            conjugator: c,
            diagonal: d,
        })
    }

    /// `c^{-1} h c`.
    pub fn pull_back(&self, h: &SpElement) -> Result<SpElement> {
        let c = &self.conjugator;
        let m = c.group_inverse().matrix().matmul(h.matrix())?.matmul(c.matrix())?;
        SpElement::from_product(m)
    }
}

fn off_product(h: &SpElement) -> f64 {
    (h.a_nn1() * h.a_n1n()).modulus()
}

fn diag_product(h: &SpElement) -> f64 {
    (h.a_nn() * h.a_n1n1()).modulus()
}

/// `h D h^{-1}`, evaluated as `I + h (D - I) h^{-1}` so that the small
/// off-diagonal entries are sums of small terms rather than cancelling sums
/// of unit-size ones; the plain product loses their relative accuracy once
/// they reach rounding level and then grows them geometrically.
fn conjugate_step(h: &SpElement, d: &[Quaternion]) -> Result<SpElement> {
    let shifted: Vec<Quaternion> = d.iter().map(|&x| x - Quaternion::ONE).collect();
    let m = h
        .matrix()
        .matmul(&QMatrix::from_diag(&shifted))?
        .matmul(h.group_inverse().matrix())?
        .add(&QMatrix::identity(d.len()))?;
    SpElement::from_product(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub verdict: Verdict,
    pub mg: f64,
    /// `|[h(u), v, u, h(v)]|`
    pub cross_abs1: f64,
    /// `|[h(u), u, v, h(v)]|`
    pub cross_abs2: f64,
    /// `mg (1 + sqrt(cross_abs1)) < 1` or `mg (1 + sqrt(cross_abs2)) < 1`.
    pub condition_holds: bool,
    /// Corner products of `c^{-1} h c`.
    pub pi0: f64,
    pub diag0: f64,
    /// Off corner product of `h_1 = h' D h'^{-1}`.
    pub pi1: f64,
    pub h1_fixes_q0: bool,
    pub h1_fixes_qinf: bool,
    /// Which branch produced the verdict.
    pub branch: String,
}

/// Degenerate routing on `h_1`: both fixed points kept means `h` preserves
/// `{u, v}`; exactly one kept means `h_1` and `g` share one fixed point.
fn degenerate_route(h1: &SpElement) -> (Option<Verdict>, bool, bool) {
    let n = h1.n();
    let (q0, qi) = (ProjectivePoint::q_zero(n), ProjectivePoint::q_infinity(n));
    let fixes0 = apply(h1, &q0).expect("same n").same_point(&q0, FIX_TOL);
    let fixes_inf = apply(h1, &qi).expect("same n").same_point(&qi, FIX_TOL);
    let zero = off_product(h1) < PI_ZERO_TOL;
    let verdict = if fixes0 && fixes_inf {
        Some(Verdict::DegenerateElementary)
    } else if zero || fixes0 || fixes_inf {
        Some(Verdict::DegenerateSharedFixedPoint)
    } else {
        None
    };
    (verdict, fixes0, fixes_inf)
}

pub fn jorgensen_test(g: &SpElement, h: &SpElement) -> Result<TestOutcome> {
    check_sizes(g, h)?;
    let frame = Frame::new(g)?;
    let (u, v) = (&frame.data.u, &frame.data.v);
    let (hu, hv) = (apply(h, u)?, apply(h, v)?);
    let cross_abs1 = cross_ratio(&hu, v, u, &hv).abs_value;
    let cross_abs2 = cross_ratio(&hu, u, v, &hv).abs_value;
    let mg = frame.data.mg;
    let condition_holds =
        mg * (1.0 + cross_abs1.sqrt()) < 1.0 || mg * (1.0 + cross_abs2.sqrt()) < 1.0;

    let hp = frame.pull_back(h)?;
    let h1 = conjugate_step(&hp, &frame.diagonal)?;
    let (route, fixes0, fixes_inf) = degenerate_route(&h1);
    let (verdict, branch) = match route {
        Some(v @ Verdict::DegenerateElementary) => (v, "h_1 fixes q_0 and q_inf"),
        Some(v) => (v, "h_1 fixes exactly one of q_0, q_inf"),
        None if condition_holds => (Verdict::ConditionHolds, "corner condition"),
        None => (Verdict::Inconclusive, "corner condition fails"),
    };
    Ok(TestOutcome {
        verdict,
        mg,
        cross_abs1,
        cross_abs2,
        condition_holds,
        pi0: off_product(&hp),
        diag0: diag_product(&hp),
        pi1: off_product(&h1),
        h1_fixes_q0: fixes0,
        h1_fixes_qinf: fixes_inf,
        branch: branch.into(),
    })
}

fn check_sizes(g: &SpElement, h: &SpElement) -> Result<()> {
    if g.n() != h.n() {
        return Err(Error::shape(format!("h in Sp({},1)", g.n()), format!("Sp({},1)", h.n())));
    }
    Ok(())
}

/// Which decay bound governs the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `T1 < 1`: `sqrt(pi_k) <= T1^k sqrt(pi_0)`.
    T1,
    /// `T2 < 1 <= T1`: `sqrt(pi_k) <= R^{k-1} sqrt(pi_1)` for `k >= 1`.
    T2,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitStep {
    pub k: usize,
    pub h: SpElement,
    pub pi: f64,
    /// `|a_nn|, |a_nn1|, |a_n1n|, |a_n1n1|`
    pub corners: [f64; 4],
    /// Frobenius norms of `alpha, beta, gamma, theta`.
    pub blocks: [f64; 4],
    /// Closed-form bound on `sqrt(pi_k)` under the active regime.
    pub bound: Option<f64>,
    /// `sqrt(pi_k)` against the closed-form bound and against one step of
    /// the induction from `sqrt(pi_{k-1})`.
    pub bound_ok: Option<bool>,
    /// Largest corner difference between the block update formulas and the
    /// matrix product (steps `k >= 1`).
    pub recursion_discrepancy: Option<f64>,
    pub member_residual: f64,
    /// `h_k` classified as loxodromic (steps `k >= 1`).
    pub loxodromic: Option<bool>,
}

impl OrbitStep {
    pub fn sqrt_pi(&self) -> f64 {
        self.pi.sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub steps: Vec<OrbitStep>,
    pub mg: f64,
    pub t1: f64,
    pub t2: f64,
    /// `mg (1 + sqrt(pi_1))`, the ratio of the `T2` regime.
    pub r: Option<f64>,
    pub regime: Regime,
    /// First step whose `pi` is zero or subnormal; the orbit stops there.
    pub underflow_at: Option<usize>,
    /// First step whose entries are no longer finite; not recorded.
    pub overflow_at: Option<usize>,
    pub frame: Frame,
}

impl IterationTrace {
    /// All recorded bound checks passed; `None` when no bound applies.
    pub fn bounds_hold(&self) -> Option<bool> {
        if self.regime == Regime::Inapplicable {
            return None;
        }
        Some(self.steps.iter().all(|s| s.bound_ok != Some(false)))
    }

    pub fn max_recursion_discrepancy(&self) -> f64 {
        self.steps
            .iter()
            .filter_map(|s| s.recursion_discrepancy)
            .fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<TraceRow> {
        self.steps
            .iter()
            .map(|s| TraceRow {
                k: s.k,
                pi_k: s.pi,
                sqrt_pi_k: s.sqrt_pi(),
                bound: s.bound.unwrap_or(f64::NAN),
                corner_nn: s.corners[0],
                corner_nn1: s.corners[1],
                corner_n1n: s.corners[2],
                corner_n1n1: s.corners[3],
                alpha: s.blocks[0],
                beta: s.blocks[1],
                gamma: s.blocks[2],
                theta: s.blocks[3],
                discrepancy: s.recursion_discrepancy.unwrap_or(0.0),
            })
            .collect()
    }
}

/// One line of the exported trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: usize,
    pub pi_k: f64,
    pub sqrt_pi_k: f64,
    pub bound: f64,
    pub corner_nn: f64,
    pub corner_nn1: f64,
    pub corner_n1n: f64,
    pub corner_n1n1: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
    pub discrepancy: f64,
}

/// The four corners of `h D h^{-1}` from the blocks of `h`, with
/// `L = diag(d_1, ..., d_{n-1})`.
pub fn corner_update(h: &SpElement, d: &[Quaternion]) -> [Quaternion; 4] {
    let p = h.n() - 1;
    let (ln, ln1) = (d[p], d[p + 1]);
    let (gamma, theta) = (h.gamma(), h.theta());
    // x L y* for row vectors x, y
    let lform = |x: &QMatrix, y: &QMatrix| -> Quaternion {
        (0..p).fold(Quaternion::ZERO, |acc, j| acc + x[(0, j)] * d[j] * y[(0, j)].conj())
    };
    let (a_nn, a_nn1, a_n1n, a_n1n1) = (h.a_nn(), h.a_nn1(), h.a_n1n(), h.a_n1n1());
    [
        -lform(&gamma, &theta) + a_nn * ln * a_n1n1.conj() + a_nn1 * ln1 * a_n1n.conj(),
        -lform(&gamma, &gamma) + a_nn * ln * a_nn1.conj() + a_nn1 * ln1 * a_nn.conj(),
        -lform(&theta, &theta) + a_n1n * ln * a_n1n1.conj() + a_n1n1 * ln1 * a_n1n.conj(),
        -lform(&theta, &gamma) + a_n1n * ln * a_nn1.conj() + a_n1n1 * ln1 * a_nn.conj(),
    ]
}

fn corners(h: &SpElement) -> [Quaternion; 4] {
    [h.a_nn(), h.a_nn1(), h.a_n1n(), h.a_n1n1()]
}

/// Runs `K` steps of `h_{k+1} = h_k D h_k^{-1}` from `h_0 = c^{-1} h c`.
pub fn conjugation_orbit(g: &SpElement, h: &SpElement, steps: usize) -> Result<IterationTrace> {
    check_sizes(g, h)?;
    if steps == 0 {
        return Err(Error::Parameter("orbit needs at least one step".into()));
    }
    let frame = Frame::new(g)?;
    let mg = frame.data.mg;
    let mut hk = frame.pull_back(h)?;
    let pi0 = off_product(&hk);
    let t1 = mg * (1.0 + pi0.sqrt());
    let t2 = mg * (1.0 + diag_product(&hk).sqrt());
    let regime = if t1 < 1.0 {
        Regime::T1
    } else if t2 < 1.0 {
        Regime::T2
    } else {
        Regime::Inapplicable
    };

    let mut trace = IterationTrace {
        steps: Vec::with_capacity(steps + 1),
        mg,
        t1,
        t2,
        r: None,
        regime,
        underflow_at: None,
        overflow_at: None,
        frame,
    };
    let d = trace.frame.diagonal.clone();
    let mut predicted: Option<[Quaternion; 4]> = None;
    for k in 0..=steps {
        let pi = off_product(&hk);
        if !pi.is_finite() || !hk.matrix().max_norm().is_finite() {
            trace.overflow_at = Some(k);
            break;
        }
        if k == 1 {
            trace.r = Some(mg * (1.0 + pi.sqrt()));
        }
        let c = corners(&hk);
        let discrepancy = predicted.map(|p| {
            (0..4).map(|i| (p[i] - c[i]).modulus()).fold(0.0, f64::max)
        });
        let (bound, bound_ok) = decay_check(&trace, k, pi);
        let scale = hk.matrix().max_norm().max(1.0);
        let member_ok = hk.residual() <= ORBIT_MEMBER_TOL * scale * scale;
        if !member_ok {
            return Err(Error::numeric(
                format!("orbit element h_{k} drifted out of the group"),
                hk.residual(),
            ));
        }
        let loxodromic = (k >= 1).then(|| {
            classify(&hk, UNIT_TOL)
                .map(|c| c.kind == Kind::Loxodromic)
                .unwrap_or(false)
        });
        let step = OrbitStep {
            k,
            corners: c.map(|q| q.modulus()),
            blocks: [
                hk.alpha().frobenius_norm(),
                hk.beta().frobenius_norm(),
                hk.gamma().frobenius_norm(),
                hk.theta().frobenius_norm(),
            ],
            h: hk.clone(),
            pi,
            bound,
            bound_ok,
            recursion_discrepancy: discrepancy,
            member_residual: hk.residual(),
            loxodromic,
        };
        trace.steps.push(step);
        if pi < f64::MIN_POSITIVE {
            trace.underflow_at = Some(k);
            break;
        }
        if k < steps {
            predicted = Some(corner_update(&hk, &d));
            hk = conjugate_step(&hk, &d)?;
        }
    }
    Ok(trace)
}

fn decay_check(trace: &IterationTrace, k: usize, pi: f64) -> (Option<f64>, Option<bool>) {
    let s = pi.sqrt();
    let prev = trace.steps.last().map(|p| p.pi.sqrt());
    let within = |lhs: f64, rhs: f64| lhs <= rhs * (1.0 + BOUND_SLACK) + BOUND_FLOOR;
    match trace.regime {
        Regime::T1 => {
            let s0 = trace.steps.first().map_or(s, |p| p.pi.sqrt());
            let bound = trace.t1.powi(k as i32) * s0;
            let step_ok = prev.is_none_or(|p| within(s, trace.t1 * p));
            (Some(bound), Some(within(s, bound) && step_ok))
        }
        Regime::T2 if k >= 1 => {
            let r = trace.r.expect("set at k = 1");
            let s1 = trace.steps.get(1).map_or(s, |p| p.pi.sqrt());
            let bound = r.powi(k as i32 - 1) * s1;
            let step_ok = k < 2 || prev.is_none_or(|p| within(s, r * p));
            (Some(bound), Some(within(s, bound) && step_ok))
        }
        _ => (None, None),
    }
}

/// Limits of `f_k = g^{-k} h_{2k} g^k` at one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FkRow {
    pub k: usize,
    pub f: QMatrix,
    /// `k ln |lambda_n|`; `|lambda_n|^{+-k}` is `exp(+-log_scale)`.
    pub log_scale: f64,
    /// Norms of the blocks `alpha, beta, gamma, theta, (n, n+1), (n+1, n)`
    /// of `f_k`.
    pub off_blocks: [f64; 6],
    /// `|A A* - I|_max` for the unitary block of `f_k`.
    pub unitarity_defect: f64,
    /// `|f_nn|`, `|f_n1n1|`.
    pub corner_moduli: [f64; 2],
    /// Largest of `| |f_nn| - |lambda_n| |`, `| |f_n1n1| - 1/|lambda_n| |`.
    pub corner_gap: f64,
}

impl FkRow {
    pub fn max_off_block(&self) -> f64 {
        self.off_blocks.iter().copied().fold(0.0, f64::max)
    }

    pub fn converged(&self, tol: f64) -> bool {
        self.max_off_block() <= tol && self.unitarity_defect <= tol && self.corner_gap <= tol
    }
}

#[derive(Debug, Clone)]
pub struct FkReport {
    pub rows: Vec<FkRow>,
    /// Set when some `pi_j`, `j <= 2K`, vanished: the degenerate routing of
    /// the test applies instead.
    pub degenerate: Option<Verdict>,
    /// Smallest max-norm distance between two of the `f_k`.
    pub min_pairwise_distance: f64,
    pub converged: bool,
    pub trace: IterationTrace,
}

impl FkReport {
    pub fn distinct(&self) -> bool {
        self.min_pairwise_distance > 0.0
    }
}

/// `f_k` for `k = 0..=K` from the orbit up to `h_{2K}`.
pub fn fk_sequence(g: &SpElement, h: &SpElement, steps: usize) -> Result<FkReport> {
    let trace = conjugation_orbit(g, h, 2 * steps.max(1))?;
    let d = trace.frame.diagonal.clone();

    let mut degenerate = None;
    if trace.underflow_at.is_some() || trace.steps[0].pi < f64::MIN_POSITIVE {
        let h1 = trace.steps.get(1).map(|s| s.h.clone());
        degenerate = Some(match h1 {
            Some(h1) => degenerate_route(&h1).0.unwrap_or(Verdict::DegenerateSharedFixedPoint),
            None => Verdict::DegenerateElementary,
        });
    }

    let mut rows = Vec::new();
    for k in 0..=steps {
        let Some(step) = trace.steps.get(2 * k) else { break };
        rows.push(fk_row(&step.h, &d, k)?);
    }
    let last_ok = rows.len() == steps + 1;
    let mut min_dist = f64::INFINITY;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            min_dist = min_dist.min(rows[i].f.max_abs_diff(&rows[j].f)?);
        }
    }
    let converged =
        degenerate.is_none() && last_ok && rows.last().is_some_and(|r| r.converged(FK_TOL));
    Ok(FkReport {
        rows,
        degenerate,
        min_pairwise_distance: min_dist,
        converged,
        trace,
    })
}

/// `f_k = D^{-k} h_{2k} D^k`, entry `(i, j)` being
/// `d_i^{-k} a_ij d_j^k`. Moduli of the powers combine as
/// `exp(k (ln|d_j| - ln|d_i|))` so `|lambda_n|^k` is never formed.
fn fk_row(h2k: &SpElement, d: &[Quaternion], k: usize) -> Result<FkRow> {
    let dim = d.len();
    let p = dim - 2;
    let kf = k as f64;
    let logs: Vec<f64> = d.iter().map(|q| q.modulus().ln()).collect();
    let up: Vec<Quaternion> = d.iter().map(|q| q.unit_powf(kf)).collect::<Result<_>>()?;
    let down: Vec<Quaternion> = d.iter().map(|q| q.unit_powf(-kf)).collect::<Result<_>>()?;
    let a = h2k.matrix();
    let mut f = QMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let scale = (kf * (logs[j] - logs[i])).exp();
            f[(i, j)] = (down[i] * a[(i, j)] * up[j]) * scale;
        }
    }
    let block = |r0, r1, c0, c1| f.submatrix(r0, r1, c0, c1).frobenius_norm();
    let off_blocks = [
        block(0, p, p, p + 1),
        block(0, p, p + 1, dim),
        block(p, p + 1, 0, p),
        block(p + 1, dim, 0, p),
        f[(p, p + 1)].modulus(),
        f[(p + 1, p)].modulus(),
    ];
    let ab = f.submatrix(0, p, 0, p);
    let unitarity_defect = ab.matmul(&ab.star())?.max_abs_diff(&QMatrix::identity(p))?;
    let corner_moduli = [f[(p, p)].modulus(), f[(p + 1, p + 1)].modulus()];
    let (ln, ln1) = (d[p].modulus(), d[p + 1].modulus());
    let corner_gap = (corner_moduli[0] - ln).abs().max((corner_moduli[1] - ln1).abs());
    Ok(FkRow {
        k,
        f,
        log_scale: kf * logs[p],
        off_blocks,
        unitarity_defect,
        corner_moduli,
        corner_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// `h {u, v} = {u, v}`, fixing both or swapping them.
    PreservesPair,
    /// `h` fixes exactly one of `u, v` and is not loxodromic.
    #[serde(rename = "FixesOne_SwapsNone")]
    FixesOneSwapsNone,
    /// `h` is loxodromic and shares exactly one fixed point with `g`, so
    /// `<g, h>` is not discrete by the classical shared-fixed-point theorem.
    SharesExactlyOne,
    Neither,
}

pub fn elementary_certificate(g: &SpElement, h: &SpElement) -> Result<Certificate> {
    check_sizes(g, h)?;
    let data = loxodromic_data(g, UNIT_TOL)?;
    let (u, v) = (&data.u, &data.v);
    let (hu, hv) = (apply(h, u)?, apply(h, v)?);
    let tol = 1e-8;
    let fixes_u = hu.same_point(u, tol);
    let fixes_v = hv.same_point(v, tol);
    let swaps = hu.same_point(v, tol) && hv.same_point(u, tol);
    Ok(if (fixes_u && fixes_v) || swaps {
        Certificate::PreservesPair
    } else if fixes_u != fixes_v {
        if classify(h, UNIT_TOL)?.kind == Kind::Loxodromic {
            Certificate::SharesExactlyOne
        } else {
            Certificate::FixesOneSwapsNone
        }
    } else {
        Certificate::Neither
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion as Q;
    use crate::spn1::{
        is_member, make_normal_form, random_element_seeded, random_perturbation,
        random_unit_quaternion, stream_rng, NormalFormKind, NormalFormParams,
    };

    fn diag(d: &[Q]) -> SpElement {
        is_member(&QMatrix::from_diag(d), 1e-12).unwrap()
    }

    fn g105() -> SpElement {
        diag(&[Q::ONE, Q::real(1.05), Q::real(1.0 / 1.05)])
    }

    fn stabilizer() -> SpElement {
        let l = Q::new(0.0, 0.6, 0.0, 0.8) * 3.0;
        diag(&[Q::J, l, l.conj().inverse().unwrap()])
    }

    fn swap() -> SpElement {
        let m = QMatrix::from_rows(vec![
            vec![Q::K, Q::ZERO, Q::ZERO],
            vec![Q::ZERO, Q::ZERO, Q::real(2.0)],
            vec![Q::ZERO, Q::real(0.5), Q::ZERO],
        ])
        .unwrap();
        is_member(&m, 1e-12).unwrap()
    }

    fn stab_infinity(lambda: Q, s_im: Q) -> SpElement {
        let a = vec![Q::new(0.3, 0.0, 0.2, 0.0)];
        let half = 0.5 * a[0].norm_sqr();
        make_normal_form(&NormalFormParams {
            kind: NormalFormKind::StabInfinity,
            unitary: QMatrix::identity(1),
            a,
            lambda,
            mu: lambda.conj().inverse().unwrap(),
            s: lambda * (Q::real(half) + s_im),
        })
        .unwrap()
    }

    /// A perturbation with `pi_0` in `[lo, hi]`.
    fn perturbation(seed: u64, lo: f64, hi: f64) -> SpElement {
        let mut rng = stream_rng(seed, 9);
        loop {
            let size = 0.02 + 0.3 * rand::Rng::random::<f64>(&mut rng);
            let h = random_perturbation(2, size, &mut rng).unwrap();
            let pi0 = off_product(&h);
            if (lo..=hi).contains(&pi0) {
                return h;
            }
        }
    }

    #[test]
    fn mg_of_the_decay_generator() {
        let f = Frame::new(&g105()).unwrap();
        let expected = 0.05 + (1.0 - 1.0 / 1.05);
        assert!((f.data.mg - expected).abs() < 1e-14);
        assert!((f.data.mg - 0.0976).abs() < 1e-4);
    }

    #[test]
    fn stabilizer_is_degenerate_elementary() {
        let o = jorgensen_test(&g105(), &stabilizer()).unwrap();
        assert_eq!(o.verdict, Verdict::DegenerateElementary);
        assert!(o.condition_holds);
        assert_eq!(o.pi0, 0.0);
        let o = jorgensen_test(&diag(&[Q::ONE, Q::real(2.0), Q::real(0.5)]), &stabilizer()).unwrap();
        assert_eq!(o.verdict, Verdict::DegenerateElementary);
    }

    #[test]
    fn swap_is_degenerate_elementary() {
        let o = jorgensen_test(&g105(), &swap()).unwrap();
        assert_eq!(o.verdict, Verdict::DegenerateElementary);
        assert!(o.h1_fixes_q0 && o.h1_fixes_qinf);
    }

    #[test]
    fn shared_fixed_point() {
        let h = stab_infinity(Q::new(0.0, 1.2, 1.6, 0.0), Q::new(0.0, 0.1, 0.0, 0.3));
        let o = jorgensen_test(&g105(), &h).unwrap();
        assert_eq!(o.verdict, Verdict::DegenerateSharedFixedPoint);
        assert!(o.h1_fixes_qinf && !o.h1_fixes_q0);
    }

    #[test]
    fn small_perturbation_satisfies_condition() {
        let h = perturbation(1, 0.009, 0.01);
        let o = jorgensen_test(&g105(), &h).unwrap();
        assert_eq!(o.verdict, Verdict::ConditionHolds);
        assert!((o.mg * (1.0 + o.cross_abs1.sqrt()) - o.mg * 1.1).abs() < 0.0005);
        assert!(o.mg * (1.0 + o.cross_abs1.sqrt()) < 0.108);
        assert!((o.cross_abs1 - o.pi0).abs() <= 1e-9);
        assert!((o.cross_abs2 - o.diag0).abs() <= 1e-9);
    }

    #[test]
    fn large_mg_is_inconclusive() {
        let g = diag(&[Q::ONE, Q::real(2.0), Q::real(0.5)]);
        for seed in 0..10 {
            let h = random_element_seeded(2, seed, 6).unwrap();
            let o = jorgensen_test(&g, &h).unwrap();
            if o.pi0 == 0.0 {
                // this word happens to lie in the stabilizer of {q_0, q_inf}
                assert_eq!(o.verdict, Verdict::DegenerateElementary);
                continue;
            }
            assert_eq!(o.verdict, Verdict::Inconclusive, "seed {seed}");
        }
    }

    #[test]
    fn rejects_non_loxodromic_g() {
        let e = jorgensen_test(&diag(&[Q::I, Q::ONE, Q::ONE]), &swap());
        assert!(matches!(e, Err(Error::Classification(_))));
    }

    #[test]
    fn orbit_of_a_stabilizer_is_zero() {
        let t = conjugation_orbit(&g105(), &stabilizer(), 8).unwrap();
        assert!(t.steps.iter().all(|s| s.pi == 0.0));
        assert_eq!(t.underflow_at, Some(0));
    }

    #[test]
    fn decay_example() {
        let h = perturbation(2, 0.9e-4, 1.1e-4);
        let t = conjugation_orbit(&g105(), &h, 16).unwrap();
        assert_eq!(t.regime, Regime::T1);
        assert!((t.t1 - 0.0986).abs() < 2e-4, "T1 = {}", t.t1);
        assert_eq!(t.bounds_hold(), Some(true));
        // sqrt(pi) shrinks by about mg per step, so pi by about mg^2 ~ 0.0095
        let first = t.steps.iter().position(|s| s.pi < 1e-20).unwrap();
        assert!((7..=8).contains(&first), "first step below 1e-20: {first}");
        assert!(t.max_recursion_discrepancy() <= 1e-9);
        assert!(t.steps.iter().skip(1).all(|s| s.loxodromic == Some(true)));
    }

    #[test]
    fn large_mg_orbit_is_unbounded() {
        let g = diag(&[Q::ONE, Q::real(2.0), Q::real(0.5)]);
        let h = random_element_seeded(2, 4, 6).unwrap();
        let t = conjugation_orbit(&g, &h, 16).unwrap();
        assert_eq!(t.regime, Regime::Inapplicable);
        assert_eq!(t.bounds_hold(), None);
        assert!(t.steps.iter().all(|s| s.bound.is_none()));
        assert!(t.steps.windows(2).all(|w| w[1].pi > w[0].pi));
        assert!(t.overflow_at.is_some());
        for s in &t.steps {
            let scale = s.h.matrix().max_norm().powi(2);
            assert!(s.recursion_discrepancy.unwrap_or(0.0) <= 1e-12 * scale);
        }
    }

    #[test]
    fn conjugated_generator_uses_frame() {
        let mut rng = stream_rng(4, 2);
        let c = random_element_seeded(2, 17, 3).unwrap();
        let g = c.conjugate(&g105()).unwrap();
        let h = c.conjugate(&perturbation(3, 1e-3, 1e-2)).unwrap();
        let a = jorgensen_test(&g, &h).unwrap();
        assert_eq!(a.verdict, Verdict::ConditionHolds);
        let d = c.conjugate(&diag(&[random_unit_quaternion(&mut rng), Q::real(3.0), Q::real(1.0 / 3.0)]))
            .unwrap();
        let t = conjugation_orbit(&d, &h, 4).unwrap();
        assert!(t.max_recursion_discrepancy() <= 1e-9);
    }

    #[test]
    fn fk_converges() {
        let h = perturbation(2, 0.9e-4, 1.1e-4);
        let r = fk_sequence(&g105(), &h, 8).unwrap();
        assert!(r.degenerate.is_none());
        assert_eq!(r.rows.len(), 9);
        let last = r.rows.last().unwrap();
        assert!(last.max_off_block() <= 1e-8, "{:?}", last.off_blocks);
        assert!(last.corner_gap <= 1e-6);
        assert!(r.converged);
        assert!(r.distinct());
    }

    #[test]
    fn fk_of_a_stabilizer_is_degenerate() {
        let r = fk_sequence(&g105(), &stabilizer(), 8).unwrap();
        assert_eq!(r.degenerate, Some(Verdict::DegenerateElementary));
        assert!(!r.converged);
    }

    #[test]
    fn certificates() {
        let g = g105();
        assert_eq!(elementary_certificate(&g, &stabilizer()).unwrap(), Certificate::PreservesPair);
        assert_eq!(elementary_certificate(&g, &swap()).unwrap(), Certificate::PreservesPair);
        let lox = stab_infinity(Q::new(0.0, 1.2, 1.6, 0.0), Q::new(0.0, 0.1, 0.0, 0.3));
        assert_eq!(elementary_certificate(&g, &lox).unwrap(), Certificate::SharesExactlyOne);
        let par = stab_infinity(Q::ONE, Q::I);
        assert_eq!(elementary_certificate(&g, &par).unwrap(), Certificate::FixesOneSwapsNone);
        let h = random_element_seeded(2, 6, 6).unwrap();
        assert_eq!(elementary_certificate(&g, &h).unwrap(), Certificate::Neither);
    }

    #[test]
    fn outcome_json() {
        let o = jorgensen_test(&g105(), &stabilizer()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&o).unwrap();
        assert_eq!(v["verdict"], "Degenerate_Elementary");
        let back: TestOutcome = serde_json::from_value(v).unwrap();
        assert_eq!(back, o);
    }
}
