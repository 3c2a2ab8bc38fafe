//! The cone `𝔠_{η,μ}`:
//!
//! ```text
//! (B2+B3)² ≤ η(A1+A2)(C1+C2),   A2+A3 ≤ μ(A1+A2),   C2+C3 ≤ μ(C1+C2)
//! ```
//!
//! with `μ − 1 ≥ η ≥ 0`, `μ > 1`, where `A_i`, `C_i` are the ascending block
//! eigenvalues and `B_i` the ascending singular values of the mixed block.
//! Membership is closed (boundary points are members).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{canonical_selfdual_basis, decompose, star, BlockData, SelfDualBasis};
use crate::error::{Error, Result};
use crate::sampling::{Sampler, SamplerConfig};
use crate::wedge::{q_operator, ricci, scalar, CurvatureOperator, TwoForm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams {
    pub eta: f64,
    pub mu: f64,
    /// `1 + 2/η`; infinite at `η = 0`.
    pub c_eta: f64,
    /// `max{μ, √(ημ), μ²}`
    pub lambda_pic: f64,
}

impl ConeParams {
    pub fn new(eta: f64, mu: f64) -> Result<Self> {
        let ok = eta.is_finite() && mu.is_finite() && eta >= 0.0 && mu > 1.0 && mu - 1.0 >= eta;
        if !ok {
            return Err(Error::InvalidParams { eta, mu });
        }
        Ok(Self {
            eta,
            mu,
            c_eta: 1.0 + 2.0 / eta,
            lambda_pic: mu.max((eta * mu).sqrt()).max(mu * mu),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Face {
    F1,
    F2,
    F3,
}

impl Face {
    pub const ALL: [Face; 3] = [Face::F1, Face::F2, Face::F3];

    pub fn index(self) -> usize {
        match self {
            Face::F1 => 0,
            Face::F2 => 1,
            Face::F3 => 2,
        }
    }

    /// Homogeneity degree of the face's closed form in `R`.
    pub fn degree(self) -> i32 {
        match self {
            Face::F1 => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::F1 => "F1",
            Face::F2 => "F2",
            Face::F3 => "F3",
        }
    }
}

/// Eight unit two-forms, `ξ1..ξ4 ∈ ∧+`, `ξ5..ξ8 ∈ ∧−`, with `ξ_{2i−1} ⊥ ξ_{2i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameOctet {
    pub xi: [TwoForm; 8],
}

impl FrameOctet {
    pub fn new(xi: [TwoForm; 8]) -> Result<Self> {
        const TOL: f64 = 1e-10;
        for (k, x) in xi.iter().enumerate() {
            if (x.norm() - 1.0).abs() > TOL {
                return Err(Error::InvalidFrame(format!("|xi{}| = {}", k + 1, x.norm())));
            }
            let sign = if k < 4 { 1.0 } else { -1.0 };
            if star(x).sub(&x.scale(sign)).norm() > TOL {
                let kind = if k < 4 { "self-dual" } else { "anti-self-dual" };
                return Err(Error::InvalidFrame(format!("xi{} is not {kind}", k + 1)));
            }
        }
        for i in 0..4 {
            let d = xi[2 * i].dot(&xi[2 * i + 1]);
            if d.abs() > TOL {
                return Err(Error::InvalidFrame(format!(
                    "<xi{}, xi{}> = {d}",
                    2 * i + 1,
                    2 * i + 2
                )));
            }
        }
        Ok(Self { xi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeFunctionals {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
    pub v: f64,
}

impl ConeFunctionals {
    pub fn f1(&self, p: &ConeParams) -> f64 {
        p.eta * self.x * self.y - self.z * self.z
    }

    pub fn f2(&self, p: &ConeParams) -> f64 {
        p.mu * self.x - self.w
    }

    pub fn f3(&self, p: &ConeParams) -> f64 {
        p.mu * self.y - self.v
    }

    pub fn faces(&self, p: &ConeParams) -> [f64; 3] {
        [self.f1(p), self.f2(p), self.f3(p)]
    }
}

pub fn frame_functionals(r: &CurvatureOperator, xi: &FrameOctet) -> ConeFunctionals {
    let q = |a: usize, b: usize| r.eval(&xi.xi[a], &xi.xi[b]);
    ConeFunctionals {
        x: q(0, 0) + q(1, 1),
        w: q(2, 2) + q(3, 3),
        y: q(4, 4) + q(5, 5),
        v: q(6, 6) + q(7, 7),
        z: q(6, 2) + q(7, 3),
    }
}

fn hat_from_blocks(d: &BlockData, p: &ConeParams) -> [f64; 3] {
    let (a, b, c) = (d.eigs_a, d.svals_b, d.eigs_c);
    let z = b[1] + b[2];
    [
        p.eta * (a[0] + a[1]) * (c[0] + c[1]) - z * z,
        p.mu * (a[0] + a[1]) - (a[1] + a[2]),
        p.mu * (c[0] + c[1]) - (c[1] + c[2]),
    ]
}

/// Closed forms `[F̂¹, F̂², F̂³]`. `F̂¹` equals the infimum over frames only
/// when `A1+A2 ≥ 0` and `C1+C2 ≥ 0`; it is always returned.
pub fn hat_f(r: &CurvatureOperator, p: &ConeParams) -> [f64; 3] {
    hat_from_blocks(&decompose(r), p)
}

/// `F̂², F̂³ ≥ −tol_abs` and then `F̂¹ ≥ −tol_abs`.
pub fn is_member(r: &CurvatureOperator, p: &ConeParams, tol_abs: f64) -> bool {
    member_from_hat(&hat_f(r, p), tol_abs)
}

fn member_from_hat(h: &[f64; 3], tol_abs: f64) -> bool {
    h[1] >= -tol_abs && h[2] >= -tol_abs && h[0] >= -tol_abs
}

pub fn shifted_membership(r: &CurvatureOperator, alpha0: f64, p: &ConeParams) -> bool {
    is_member(&r.shift(alpha0), p, 0.0)
}

/// A frame at which the named functional combination attains its closed form.
///
/// * `F2`: `ξ1, ξ2` are `A`-eigenvectors for `A1, A2`; `ξ3, ξ4` for `A3, A2`.
///   The `∧−` half is the analogous choice for `C`.
/// * `F3`: the mirror image (`C` in `ξ5..ξ8`, `A` in `ξ1..ξ4`).
/// * `F1`: `ξ1, ξ2` for `A1, A2`, `ξ5, ξ6` for `C1, C2`, and `(ξ3, ξ7)`,
///   `(ξ4, ξ8)` the singular pairs of `B` for `B3`, `B2`, so `Z = B2 + B3`.
pub fn extremal_frame(r: &CurvatureOperator, target: Face) -> FrameOctet {
    extremal_frame_from(&decompose(r), &canonical_selfdual_basis(), target)
}

pub fn extremal_frame_from(d: &BlockData, basis: &SelfDualBasis, target: Face) -> FrameOctet {
    let p = |v: &[f64; 3]| basis.plus_form(v);
    let m = |v: &[f64; 3]| basis.minus_form(v);
    let (fa, fc) = (&d.frame_a, &d.frame_c);
    let xi = match target {
        Face::F1 => {
            let (u, v) = (&d.frame_b_left, &d.frame_b_right);
            [
                p(&fa[0]),
                p(&fa[1]),
                p(&u[2]),
                p(&u[1]),
                m(&fc[0]),
                m(&fc[1]),
                m(&v[2]),
                m(&v[1]),
            ]
        }
        Face::F2 | Face::F3 => [
            p(&fa[0]),
            p(&fa[1]),
            p(&fa[2]),
            p(&fa[1]),
            m(&fc[0]),
            m(&fc[1]),
            m(&fc[2]),
            m(&fc[1]),
        ],
    };
    FrameOctet::new(xi).expect("eigen and singular frames are orthonormal")
}

/// Minima of the three face expressions over `n` random frames drawn from
/// substreams `0..n` of `seed`. An upper estimate of the infima.
pub fn sampled_inf(r: &CurvatureOperator, p: &ConeParams, n: usize, seed: u64) -> [f64; 3] {
    let basis = canonical_selfdual_basis();
    let cfg = SamplerConfig {
        seed,
        ..Default::default()
    };
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let xi = Sampler::substream(cfg, i).random_frame_octet(&basis);
            frame_functionals(r, &xi).faces(p)
        })
        .reduce(
            || [f64::INFINITY; 3],
            |a, b| [a[0].min(b[0]), a[1].min(b[1]), a[2].min(b[2])],
        )
}

/// Upper end of the bisection bracket for `l`.
fn l_bracket(r: &CurvatureOperator, p: &ConeParams) -> f64 {
    let norm = r.norm();
    if p.eta > 0.0 {
        p.c_eta * norm + 1.0
    } else {
        (p.mu + 1.0) / (p.mu - 1.0) * norm + 1.0
    }
}

/// `l(R) = inf{α ≥ 0 : R + α𝓘 ∈ 𝔠}` by bisection, returned from the member
/// side (so `R + l𝓘` is a member) to within `tol`.
///
/// At `η = 0` the first condition forces `B2 + B3 = 0`; an operator with
/// `B2 + B3 > 1e-12‖R‖` has no admissible shift and is reported as a
/// precondition failure.
pub fn lower_bound_l(r: &CurvatureOperator, p: &ConeParams, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tol must be positive, got {tol}")));
    }
    let mut d = decompose(r);
    if p.eta == 0.0 {
        let z = d.svals_b[1] + d.svals_b[2];
        if z > 1e-12 * r.norm() {
            return Err(Error::Precondition(format!(
                "eta = 0 requires B2 + B3 = 0, got {z:e}"
            )));
        }
        // numerically vanishing B is treated as exactly zero
        d.svals_b = [0.0; 3];
    }
    // shifting by α𝓘 adds α to every block eigenvalue and leaves B alone
    let member_at = |alpha: f64| {
        let mut s = d;
        s.eigs_a = s.eigs_a.map(|x| x + alpha);
        s.eigs_c = s.eigs_c.map(|x| x + alpha);
        member_from_hat(&hat_from_blocks(&s, p), 0.0)
    };
    l_bisect(member_at, l_bracket(r, p), tol)
}

fn l_bisect<F: Fn(f64) -> bool>(member_at: F, bracket: f64, tol: f64) -> Result<f64> {
    if member_at(0.0) {
        return Ok(0.0);
    }
    let mut hi = bracket;
    while !member_at(hi) {
        hi *= 2.0;
        if hi > 2f64.powi(60) {
            return Err(Error::NonMonotone);
        }
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if member_at(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Default bisection tolerance for `l`, relative to `max(1, ‖R‖)`.
pub fn default_l_tol(r: &CurvatureOperator) -> f64 {
    1e-13 * r.norm().max(1.0)
}

/// Slacks of the null-vector inequalities at the extremal frame of `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullVectorReport {
    pub face: Face,
    /// `F1`: `ηY X^Q + ηX Y^Q − 2Z Z^Q`; `F2`: `μX^Q − W^Q`; `F3`: `μY^Q − V^Q`.
    pub slack: f64,
    /// `X^Q − (A1² + A2² + 2(A1+A2)A3 + 2B1²)`
    pub hamilton_slack: f64,
    /// Value of the named face at `R`.
    pub face_value: f64,
}

pub fn null_vector_verify(r: &CurvatureOperator, p: &ConeParams, face: Face) -> Result<NullVectorReport> {
    null_vector_verify_with(r, p, face, &q_operator(r))
}

/// [`null_vector_verify`] with the reaction term `q` supplied by the caller.
pub fn null_vector_verify_with(
    r: &CurvatureOperator,
    p: &ConeParams,
    face: Face,
    q: &CurvatureOperator,
) -> Result<NullVectorReport> {
    let d = decompose(r);
    let hat = hat_from_blocks(&d, p);
    let norm = r.norm();
    let face_value = hat[face.index()];
    if !member_from_hat(&hat, 1e-12 * norm.max(1.0).powi(2)) {
        return Err(Error::Precondition(format!("operator is not a member: {hat:?}")));
    }
    if face_value.abs() > 1e-8 * norm.powi(face.degree()) {
        return Err(Error::Precondition(format!(
            "{} = {face_value:e} is not on the boundary",
            face.name()
        )));
    }
    let xi = extremal_frame_from(&d, &canonical_selfdual_basis(), face);
    let fr = frame_functionals(r, &xi);
    let fq = frame_functionals(q, &xi);
    let slack = match face {
        Face::F1 => p.eta * fr.y * fq.x + p.eta * fr.x * fq.y - 2.0 * fr.z * fq.z,
        Face::F2 => p.mu * fq.x - fq.w,
        Face::F3 => p.mu * fq.y - fq.v,
    };
    let (a, b) = (d.eigs_a, d.svals_b);
    let bound = a[0] * a[0] + a[1] * a[1] + 2.0 * (a[0] + a[1]) * a[2] + 2.0 * b[0] * b[0];
    Ok(NullVectorReport {
        face,
        slack,
        hamilton_slack: fq.x - bound,
        face_value,
    })
}

/// `A1+A2 ≥ −1e-10‖R‖` and `C1+C2 ≥ −1e-10‖R‖`.
pub fn implies_wpic(r: &CurvatureOperator) -> bool {
    let d = decompose(r);
    let tol = 1e-10 * r.norm();
    d.eigs_a[0] + d.eigs_a[1] >= -tol && d.eigs_c[0] + d.eigs_c[1] >= -tol
}

/// `R(f1∧f3, f1∧f3) + R(f2∧f3, f2∧f3)`, i.e. `R1313 + R2323` in the frame.
pub fn flag_value(r: &CurvatureOperator, f: &[[f64; 4]; 3]) -> f64 {
    let u = TwoForm::wedge(&f[0], &f[2]);
    let v = TwoForm::wedge(&f[1], &f[2]);
    r.eval(&u, &u) + r.eval(&v, &v)
}

/// `½(A1 + A2 + C1 + C2 − 2B2 − 2B3)`, a lower bound for every flag value.
pub fn flag_certificate(r: &CurvatureOperator) -> f64 {
    let d = decompose(r);
    0.5 * (d.eigs_a[0] + d.eigs_a[1] + d.eigs_c[0] + d.eigs_c[1]
        - 2.0 * d.svals_b[1]
        - 2.0 * d.svals_b[2])
}

/// Minimum flag value over `n` random orthonormal 3-frames, and the
/// closed-form certificate.
pub fn two_nonneg_flag(r: &CurvatureOperator, n: usize, seed: u64) -> (f64, f64) {
    let cfg = SamplerConfig {
        seed,
        ..Default::default()
    };
    let min = (0..n as u64)
        .into_par_iter()
        .map(|i| flag_value(r, &Sampler::substream(cfg, i).random_3frame()))
        .reduce(|| f64::INFINITY, f64::min);
    (min, flag_certificate(r))
}

/// `λ_min(Ric) − (1 − (4/3)√η)𝓡/4`, defined for `η < 9/16`, `𝓡 ≥ 0` and
/// `F̂¹ ≥ 0`.
pub fn ricci_pinch_check(r: &CurvatureOperator, p: &ConeParams) -> Result<f64> {
    if p.eta >= 9.0 / 16.0 {
        return Err(Error::Precondition(format!("needs eta < 9/16, got {}", p.eta)));
    }
    let tol = 1e-12 * r.norm().max(1.0);
    let s = scalar(r);
    if s < -tol {
        return Err(Error::Precondition(format!("scalar curvature {s} is negative")));
    }
    let h = hat_f(r, p);
    if h[0] < -tol * r.norm().max(1.0) {
        return Err(Error::Precondition(format!("first cone condition fails: F1 = {}", h[0])));
    }
    let lmin = ricci(r).eigenvalues()[0];
    Ok(lmin - (1.0 - 4.0 / 3.0 * p.eta.sqrt()) * s / 4.0)
}

/// `Λ·min{A1+A2, C1+C2} − max{A3, B3, C3}` for nonzero members.
pub fn uniform_pic_check(r: &CurvatureOperator, p: &ConeParams) -> Result<f64> {
    if r.norm() == 0.0 {
        return Err(Error::Precondition("zero operator".into()));
    }
    let d = decompose(r);
    if !member_from_hat(&hat_from_blocks(&d, p), 0.0) {
        return Err(Error::Precondition("operator is not a member".into()));
    }
    let top = d.eigs_a[2].max(d.svals_b[2]).max(d.eigs_c[2]);
    if top <= 0.0 {
        return Err(Error::Precondition(format!("max(A3, B3, C3) = {top} is not positive")));
    }
    let low = (d.eigs_a[0] + d.eigs_a[1]).min(d.eigs_c[0] + d.eigs_c[1]);
    Ok(p.lambda_pic * low - top)
}

/// `R = k𝓘` with `k ≥ 0`, up to `tol`.
pub fn is_c01(r: &CurvatureOperator, tol: f64) -> bool {
    let k = r.trace() / 6.0;
    r.shift(-k).norm() <= tol * r.norm() && r.trace() >= -tol
}

/// Per-operator summary; fields whose precondition fails are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub member: bool,
    #[serde(rename = "F1")]
    pub f1: f64,
    #[serde(rename = "F2")]
    pub f2: f64,
    #[serde(rename = "F3")]
    pub f3: f64,
    pub l: Option<f64>,
    pub wpic: bool,
    pub flag2_certificate: f64,
    pub ricci_pinch_slack: Option<f64>,
    pub upic_slack: Option<f64>,
}

pub fn check_report(r: &CurvatureOperator, p: &ConeParams, l_tol: Option<f64>) -> CheckReport {
    let h = hat_f(r, p);
    let member = member_from_hat(&h, 0.0);
    let tol = l_tol.unwrap_or_else(|| default_l_tol(r));
    CheckReport {
        member,
        f1: h[0],
        f2: h[1],
        f3: h[2],
        l: lower_bound_l(r, p, tol).ok(),
        wpic: implies_wpic(r),
        flag2_certificate: flag_certificate(r),
        ricci_pinch_slack: ricci_pinch_check(r, p).ok(),
        upic_slack: uniform_pic_check(r, p).ok(),
    }
}
