//! Two-forms on ℝ⁴, the Lie algebra 𝔰𝔬(4) and algebraic curvature operators.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * Two-forms are written in the ordered basis
//!   `e1∧e2, e1∧e3, e1∧e4, e2∧e3, e2∧e4, e3∧e4` (indices 0..6).
//! * `e_i∧e_j` is identified with the skew matrix `E_ij − E_ji`, the bracket
//!   is the matrix commutator and `⟨u, v⟩ = −½ tr(uv)`, which makes the basis
//!   above orthonormal.
//! * A curvature operator is a symmetric 6×6 matrix `R` in that basis with
//!   `R_{ijkl} = R(e_i∧e_j, e_k∧e_l)`. Then `R_{ijij}` is the sectional
//!   curvature of the `(i, j)` plane and the identity matrix `𝓘` has constant
//!   sectional curvature 1.
//!
//! These normalizations differ from Hamilton's 1986 ones by a factor of 2
//! (his eigenvalues are twice ours); everything here uses the normalization
//! above exclusively.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

pub type Mat6 = Mat<6>;
pub type Mat4 = Mat<4>;

/// Index pairs `(i, j)`, `i < j`, of the wedge basis, zero-based.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Position of `e_i∧e_j` in the basis together with the orientation sign, or
/// `None` when `i == j`.
pub fn pair_index(i: usize, j: usize) -> Option<(usize, f64)> {
    if i == j {
        return None;
    }
    let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
    let idx = PAIRS.iter().position(|&p| p == (a, b)).expect("valid pair");
    Some((idx, sign))
}

/// A two-form on ℝ⁴, by its coefficients in the wedge basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoForm(pub [f64; 6]);

impl TwoForm {
    pub const ZERO: TwoForm = TwoForm([0.0; 6]);

    /// The basis element `e_i∧e_j` (zero-based indices; `i > j` gives the
    /// negative of `e_j∧e_i`).
    pub fn basis(i: usize, j: usize) -> TwoForm {
        let mut c = [0.0; 6];
        if let Some((idx, sign)) = pair_index(i, j) {
            c[idx] = sign;
        }
        TwoForm(c)
    }

    /// `a∧b` for vectors of ℝ⁴.
    pub fn wedge(a: &[f64; 4], b: &[f64; 4]) -> TwoForm {
        TwoForm(PAIRS.map(|(i, j)| a[i] * b[j] - a[j] * b[i]))
    }

    pub fn coeffs(&self) -> &[f64; 6] {
        &self.0
    }

    pub fn dot(&self, other: &TwoForm) -> f64 {
        linalg::dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }

    pub fn scale(&self, c: f64) -> TwoForm {
        TwoForm(self.0.map(|x| c * x))
    }

    pub fn add(&self, other: &TwoForm) -> TwoForm {
        TwoForm(std::array::from_fn(|i| self.0[i] + other.0[i]))
    }

    pub fn sub(&self, other: &TwoForm) -> TwoForm {
        TwoForm(std::array::from_fn(|i| self.0[i] - other.0[i]))
    }

    /// The skew-symmetric 4×4 matrix `Σ c_{ij} (E_ij − E_ji)`.
    pub fn to_skew(&self) -> Mat4 {
        let mut m = linalg::zeros::<4>();
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            m[i][j] = self.0[k];
            m[j][i] = -self.0[k];
        }
        m
    }

    pub fn from_skew(m: &Mat4) -> TwoForm {
        TwoForm(PAIRS.map(|(i, j)| m[i][j]))
    }
}

/// Lie bracket of two-forms, computed as the commutator of skew matrices.
pub fn lie_bracket(u: &TwoForm, v: &TwoForm) -> TwoForm {
    let (a, b) = (u.to_skew(), v.to_skew());
    let ab = linalg::matmul(&a, &b);
    let ba = linalg::matmul(&b, &a);
    TwoForm::from_skew(&linalg::sub(&ab, &ba))
}

/// Structure constants `c[γ][α][β]` with `[e_α, e_β] = Σ_γ c[γ][α][β] e_γ`.
///
/// Built from the Kronecker-delta closed form
/// `[e_i∧e_j, e_k∧e_l] = δ_jk e_i∧e_l − δ_jl e_i∧e_k − δ_ik e_j∧e_l + δ_il e_j∧e_k`,
/// independently of [`lie_bracket`].
pub fn structure_constants() -> [[[f64; 6]; 6]; 6] {
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut c = [[[0.0; 6]; 6]; 6];
    for (alpha, &(i, j)) in PAIRS.iter().enumerate() {
        for (beta, &(k, l)) in PAIRS.iter().enumerate() {
            let terms = [
                (delta(j, k), i, l),
                (-delta(j, l), i, k),
                (-delta(i, k), j, l),
                (delta(i, l), j, k),
            ];
            for (coef, p, q) in terms {
                if coef == 0.0 {
                    continue;
                }
                if let Some((gamma, sign)) = pair_index(p, q) {
                    c[gamma][alpha][beta] += coef * sign;
                }
            }
        }
    }
    c
}

/// Nonzero structure constants grouped by output index: for each `γ` the
/// list of `(α, β, c)` with `c = c[γ][α][β] ≠ 0`.
fn sparse_structure() -> [Vec<(usize, usize, f64)>; 6] {
    let c = structure_constants();
    std::array::from_fn(|g| {
        let mut v = Vec::new();
        for a in 0..6 {
            for b in 0..6 {
                if c[g][a][b] != 0.0 {
                    v.push((a, b, c[g][a][b]));
                }
            }
        }
        v
    })
}

/// A symmetric bilinear form on ∧²ℝ⁴, stored as a dense symmetric 6×6 matrix.
///
/// The first Bianchi identity is not enforced on construction: `R²` and `R#`
/// are symmetric forms that are not curvature operators, and tests need such
/// elements. Use [`CurvatureOperator::project_bianchi`] to project explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureOperator {
    m: Mat6,
}

impl CurvatureOperator {
    pub fn zero() -> Self {
        Self {
            m: linalg::zeros(),
        }
    }

    /// `𝓘`, the operator of constant sectional curvature 1.
    pub fn identity() -> Self {
        Self {
            m: linalg::identity(),
        }
    }

    /// Builds from a full matrix; rejects asymmetry above `1e-12` relative and
    /// symmetrizes what is accepted.
    pub fn from_matrix(m: Mat6) -> Result<Self> {
        let scale = linalg::frobenius(&m).max(1.0);
        for i in 0..6 {
            for j in 0..i {
                if (m[i][j] - m[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        diff: m[i][j] - m[j][i],
                    });
                }
            }
        }
        Ok(Self::from_matrix_symmetrized(m))
    }

    /// `½(m + mᵀ)`.
    pub fn from_matrix_symmetrized(m: Mat6) -> Self {
        let mut out = m;
        for i in 0..6 {
            for j in 0..i {
                let avg = 0.5 * (m[i][j] + m[j][i]);
                out[i][j] = avg;
                out[j][i] = avg;
            }
        }
        Self { m: out }
    }

    /// Builds from the 21 row-major upper-triangle entries.
    pub fn from_upper(upper: &[f64]) -> Result<Self> {
        if upper.len() != 21 {
            return Err(Error::UpperLength(upper.len()));
        }
        if let Some(bad) = upper.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(*bad));
        }
        let mut m = linalg::zeros::<6>();
        let mut k = 0;
        for i in 0..6 {
            for j in i..6 {
                m[i][j] = upper[k];
                m[j][i] = upper[k];
                k += 1;
            }
        }
        Ok(Self { m })
    }

    /// The 21 row-major upper-triangle entries.
    pub fn upper(&self) -> [f64; 21] {
        let mut out = [0.0; 21];
        let mut k = 0;
        for i in 0..6 {
            for j in i..6 {
                out[k] = self.m[i][j];
                k += 1;
            }
        }
        out
    }

    pub fn matrix(&self) -> &Mat6 {
        &self.m
    }

    pub fn entry(&self, a: usize, b: usize) -> f64 {
        self.m[a][b]
    }

    /// `R(u, v)`.
    pub fn eval(&self, u: &TwoForm, v: &TwoForm) -> f64 {
        linalg::bilinear(&self.m, &u.0, &v.0)
    }

    /// The operator applied to a two-form, `R(u)`.
    pub fn apply(&self, u: &TwoForm) -> TwoForm {
        TwoForm(linalg::matvec(&self.m, &u.0))
    }

    /// The four-index tensor `R_{ijkl}`.
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        match (pair_index(i, j), pair_index(k, l)) {
            (Some((a, s)), Some((b, t))) => s * t * self.m[a][b],
            _ => 0.0,
        }
    }

    pub fn tensor(&self) -> [[[[f64; 4]; 4]; 4]; 4] {
        let mut t = [[[[0.0; 4]; 4]; 4]; 4];
        for (i, ti) in t.iter_mut().enumerate() {
            for (j, tij) in ti.iter_mut().enumerate() {
                for (k, tijk) in tij.iter_mut().enumerate() {
                    for (l, x) in tijk.iter_mut().enumerate() {
                        *x = self.component(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    /// Frobenius norm of the 6×6 matrix, i.e. `(Σ_{i<j, k<l} R_{ijkl}²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        linalg::frobenius(&self.m)
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.m)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            m: self.m.map(|row| row.map(|x| c * x)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j] + other.m[i][j])),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j] - other.m[i][j])),
        }
    }

    /// `self + c·𝓘`
    pub fn shift(&self, c: f64) -> Self {
        let mut m = self.m;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += c;
        }
        Self { m }
    }

    /// Composition `R∘S` as operators.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix_symmetrized(linalg::matmul(&self.m, &other.m))
    }

    /// `R₁₂₃₄ − R₁₃₂₄ + R₁₄₂₃`, the first Bianchi sum.
    pub fn bianchi_sum(&self) -> f64 {
        self.m[0][5] - self.m[1][4] + self.m[2][3]
    }

    /// Orthogonal projection (Frobenius inner product on symmetric matrices)
    /// onto the hyperplane where the first Bianchi sum vanishes.
    pub fn project_bianchi(&self) -> Self {
        // unit normal N: N_05 = N_23 = ½, N_14 = −½ (and transposes), ‖N‖² = 3/2
        let f = self.bianchi_sum();
        let c = f / 1.5 * 0.5;
        let mut m = self.m;
        for (a, b, s) in [(0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)] {
            m[a][b] -= s * c;
            m[b][a] -= s * c;
        }
        Self { m }
    }

    /// Conjugation by a rotation `p` of ℝ⁴: `R ↦ Λ²p · R · Λ²pᵀ`.
    pub fn rotate(&self, p: &Mat4) -> Self {
        let l = wedge_square(p);
        let lr = linalg::matmul(&l, &self.m);
        Self::from_matrix_symmetrized(linalg::matmul(&lr, &linalg::transpose(&l)))
    }
}

/// The induced action `Λ²p` of `p ∈ O(4)` on two-forms.
pub fn wedge_square(p: &Mat4) -> Mat6 {
    let mut l = linalg::zeros::<6>();
    for (a, &(i, j)) in PAIRS.iter().enumerate() {
        for (b, &(k, m)) in PAIRS.iter().enumerate() {
            l[a][b] = p[i][k] * p[j][m] - p[i][m] * p[j][k];
        }
    }
    l
}

/// A symmetric 2-tensor on ℝ⁴ (Ric, R̊c, the metric).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricTwoTensor(pub Mat4);

impl SymmetricTwoTensor {
    pub fn identity() -> Self {
        Self(linalg::identity())
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.0)
    }

    pub fn norm(&self) -> f64 {
        linalg::frobenius(&self.0)
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::sym_eigen(&self.0).values
    }
}

/// `(M#N)_{αβ} = ½ Σ c_α^{γη} c_β^{δθ} M_{γδ} N_{ηθ}`.
///
/// Defined on all symmetric forms. The result is symmetrized in `(M, N)` and
/// in the output indices, so `sharp(M, N) == sharp(N, M)` holds bit-for-bit.
pub fn sharp(m: &CurvatureOperator, n: &CurvatureOperator) -> CurvatureOperator {
    thread_local! {
        static SPARSE: [Vec<(usize, usize, f64)>; 6] = sparse_structure();
    }
    SPARSE.with(|sp| {
        let half = |x: &Mat6, y: &Mat6| {
            let mut out = linalg::zeros::<6>();
            for a in 0..6 {
                for b in 0..6 {
                    let mut s = 0.0;
                    for &(g, e, ca) in &sp[a] {
                        for &(d, t, cb) in &sp[b] {
                            s += ca * cb * x[g][d] * y[e][t];
                        }
                    }
                    out[a][b] = 0.5 * s;
                }
            }
            out
        };
        let mn = half(&m.m, &n.m);
        let nm = half(&n.m, &m.m);
        let mut out = linalg::zeros::<6>();
        for a in 0..6 {
            for b in 0..6 {
                out[a][b] = 0.5 * (mn[a][b] + nm[a][b]);
            }
        }
        CurvatureOperator::from_matrix_symmetrized(out)
    })
}

/// `R#` through the four-index contraction `R_{ipkw}R_{jplw} − R_{jpkw}R_{iplw}`,
/// an independent route to `sharp(R, R)`.
pub fn sharp_coord(r: &CurvatureOperator) -> CurvatureOperator {
    let t = r.tensor();
    let mut out = linalg::zeros::<6>();
    for (a, &(i, j)) in PAIRS.iter().enumerate() {
        for (b, &(k, l)) in PAIRS.iter().enumerate() {
            let mut s = 0.0;
            for p in 0..4 {
                for w in 0..4 {
                    s += t[i][p][k][w] * t[j][p][l][w] - t[j][p][k][w] * t[i][p][l][w];
                }
            }
            out[a][b] = s;
        }
    }
    CurvatureOperator::from_matrix_symmetrized(out)
}

/// `Q(R) = R² + R#`, the reaction term of the curvature evolution.
pub fn q_operator(r: &CurvatureOperator) -> CurvatureOperator {
    r.compose(r).add(&sharp(r, r))
}

/// Kulkarni–Nomizu product
/// `(h∧k)_{ijkl} = h_ik k_jl + h_jl k_ik − h_il k_jk − h_jk k_il`.
pub fn kulkarni_nomizu(h: &SymmetricTwoTensor, k: &SymmetricTwoTensor) -> CurvatureOperator {
    let (h, k) = (&h.0, &k.0);
    let mut out = linalg::zeros::<6>();
    for (a, &(i, j)) in PAIRS.iter().enumerate() {
        for (b, &(p, q)) in PAIRS.iter().enumerate() {
            out[a][b] = h[i][p] * k[j][q] + h[j][q] * k[i][p] - h[i][q] * k[j][p] - h[j][p] * k[i][q];
        }
    }
    CurvatureOperator::from_matrix_symmetrized(out)
}

/// `Ric_{jl} = Σ_i R_{ijil}`.
pub fn ricci(r: &CurvatureOperator) -> SymmetricTwoTensor {
    let mut ric = linalg::zeros::<4>();
    for (j, row) in ric.iter_mut().enumerate() {
        for (l, x) in row.iter_mut().enumerate() {
            *x = (0..4).map(|i| r.component(i, j, i, l)).sum();
        }
    }
    SymmetricTwoTensor(ric)
}

pub fn scalar(r: &CurvatureOperator) -> f64 {
    ricci(r).trace()
}

/// `R̊c = Ric − (𝓡/4) g`.
pub fn traceless_ricci(r: &CurvatureOperator) -> SymmetricTwoTensor {
    let mut ric = ricci(r);
    let s = ric.trace() / 4.0;
    for i in 0..4 {
        ric.0[i][i] -= s;
    }
    ric
}

/// `|R₁₂₃₄ − R₁₃₂₄ + R₁₄₂₃|`; zero exactly on algebraic curvature operators.
pub fn bianchi_residual(r: &CurvatureOperator) -> f64 {
    r.bianchi_sum().abs()
}

/// `‖Q(ΦR + φ𝓘) − Φ²Q(R) − φΦ (Ric∧id) − 3φ²𝓘‖`.
pub fn barrier_q_expansion(r: &CurvatureOperator, big_phi: f64, phi: f64) -> f64 {
    let lhs = q_operator(&r.scale(big_phi).shift(phi));
    let ric_id = kulkarni_nomizu(&ricci(r), &SymmetricTwoTensor::identity());
    let rhs = q_operator(r)
        .scale(big_phi * big_phi)
        .add(&ric_id.scale(phi * big_phi))
        .shift(3.0 * phi * phi);
    lhs.sub(&rhs).norm()
}

/// Wire format of a single operator: `{"basis":"wedge4","upper":[21 numbers]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub basis: String,
    pub upper: Vec<f64>,
}

pub const BASIS_TAG: &str = "wedge4";

impl From<&CurvatureOperator> for OperatorJson {
    fn from(r: &CurvatureOperator) -> Self {
        OperatorJson {
            basis: BASIS_TAG.to_string(),
            upper: r.upper().to_vec(),
        }
    }
}

impl TryFrom<OperatorJson> for CurvatureOperator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self> {
        if j.basis != BASIS_TAG {
            return Err(Error::UnknownBasis(j.basis));
        }
        CurvatureOperator::from_upper(&j.upper)
    }
}

impl CurvatureOperator {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&OperatorJson::from(self)).expect("plain struct serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: OperatorJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        j.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, j: usize) -> TwoForm {
        TwoForm::basis(i - 1, j - 1)
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(lie_bracket(&e(1, 2), &e(1, 3)), e(2, 3).scale(-1.0));
        assert_eq!(lie_bracket(&e(1, 2), &e(3, 4)), TwoForm::ZERO);
        let u = TwoForm([0.3, -1.2, 0.7, 2.0, 0.1, -0.4]);
        assert_eq!(lie_bracket(&u, &u), TwoForm::ZERO);
    }

    #[test]
    fn structure_constant_single_slot() {
        let c = structure_constants();
        // e1∧e2 is index 0, e1∧e3 index 1, e2∧e3 index 3
        for g in 0..6 {
            let want = if g == 3 { -1.0 } else { 0.0 };
            assert_eq!(c[g][0][1], want);
        }
        for g in 0..6 {
            for a in 0..6 {
                assert_eq!(c[g][a][a], 0.0);
            }
        }
    }

    #[test]
    fn identity_contractions() {
        let id = CurvatureOperator::identity();
        let ric = ricci(&id);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(ric.0[i][j], if i == j { 3.0 } else { 0.0 });
            }
        }
        assert_eq!(scalar(&id), 12.0);
        assert_eq!(traceless_ricci(&id).norm(), 0.0);
        assert_eq!(bianchi_residual(&id), 0.0);
        assert_eq!(id.component(0, 1, 0, 1), 1.0);
        assert_eq!(id.component(1, 0, 0, 1), -1.0);
    }

    #[test]
    fn identity_sharp_and_q() {
        let id = CurvatureOperator::identity();
        assert_eq!(sharp(&id, &id), id.scale(2.0));
        assert_eq!(sharp_coord(&id), id.scale(2.0));
        assert_eq!(q_operator(&id), id.scale(3.0));
        let c = 1.7;
        let q = q_operator(&id.scale(c));
        assert!(q.sub(&id.scale(3.0 * c * c)).norm() < 1e-14);
        assert_eq!(q_operator(&CurvatureOperator::zero()), CurvatureOperator::zero());
        assert_eq!(sharp(&CurvatureOperator::zero(), &id), CurvatureOperator::zero());
    }

    #[test]
    fn kn_of_metric_is_twice_identity() {
        let g = SymmetricTwoTensor::identity();
        assert_eq!(kulkarni_nomizu(&g, &g), CurvatureOperator::identity().scale(2.0));
    }

    #[test]
    fn upper_length_is_checked() {
        assert!(matches!(
            CurvatureOperator::from_upper(&[0.0; 20]),
            Err(Error::UpperLength(20))
        ));
        let r = CurvatureOperator::from_json(
            r#"{"basis":"wedge4","upper":[1,0,0,0,0,0,1,0,0,0,0,1,0,0,0,1,0,0,1,0,1]}"#,
        )
        .unwrap();
        assert_eq!(r, CurvatureOperator::identity());
        assert!(CurvatureOperator::from_json(r#"{"basis":"other","upper":[]}"#).is_err());
    }

    #[test]
    fn projection_kills_bianchi_sum() {
        let mut m = linalg::zeros::<6>();
        m[0][5] = 1.0;
        m[5][0] = 1.0;
        let r = CurvatureOperator::from_matrix(m).unwrap();
        let p = r.project_bianchi();
        assert!(bianchi_residual(&p) < 1e-15);
        assert!(p.project_bianchi().sub(&p).norm() < 1e-15);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let mut m = linalg::zeros::<6>();
        m[0][1] = 1.0;
        assert!(CurvatureOperator::from_matrix(m).is_err());
    }
}
