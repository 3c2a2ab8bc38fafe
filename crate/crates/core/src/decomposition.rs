//! Self-dual/anti-self-dual splitting of ∧²ℝ⁴ and the block form
//! `R = [[A, B], [Bᵀ, C]]`.
//!
//! The canonical basis is built from `W = span(e1, e2, e3)`, `e⊥ = e4` with
//! `w1 = −e2∧e3`, `w2 = e1∧e3`, `w3 = −e1∧e2`, which satisfies `[w1, w2] = w3`
//! under the bracket of [`crate::wedge`]. With `φ±_i = (w_i ± ⋆w_i)/√2` this
//! gives `[φ±_1, φ±_2] = √2 φ±_3` cyclically. (The choice
//! `w = (e2∧e3, e3∧e1, e1∧e2)` yields `−√2` instead with our bracket sign.)

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Mat3, Vec3};
use crate::wedge::{
    kulkarni_nomizu, scalar, sharp_coord, traceless_ricci, CurvatureOperator, Mat6, TwoForm,
};

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The Hodge star on two-forms as a 6×6 matrix in the wedge basis:
/// `e12 ↔ e34`, `e13 ↔ −e24`, `e14 ↔ e23`.
pub fn hodge_star() -> Mat6 {
    let mut s = linalg::zeros::<6>();
    for (a, b, sign) in [(0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)] {
        s[a][b] = sign;
        s[b][a] = sign;
    }
    s
}

pub fn star(u: &TwoForm) -> TwoForm {
    TwoForm(linalg::matvec(&hodge_star(), &u.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfDualBasis {
    pub plus: [TwoForm; 3],
    pub minus: [TwoForm; 3],
}

impl SelfDualBasis {
    /// Rows `φ+_1, φ+_2, φ+_3, φ−_1, φ−_2, φ−_3`, an orthogonal matrix.
    pub fn change_of_basis(&self) -> Mat6 {
        let mut p = linalg::zeros::<6>();
        for i in 0..3 {
            p[i] = self.plus[i].0;
            p[i + 3] = self.minus[i].0;
        }
        p
    }

    /// `Σ_i v_i φ+_i`
    pub fn plus_form(&self, v: &Vec3) -> TwoForm {
        (0..3).fold(TwoForm::ZERO, |acc, i| acc.add(&self.plus[i].scale(v[i])))
    }

    /// `Σ_i v_i φ−_i`
    pub fn minus_form(&self, v: &Vec3) -> TwoForm {
        (0..3).fold(TwoForm::ZERO, |acc, i| acc.add(&self.minus[i].scale(v[i])))
    }
}

pub fn canonical_selfdual_basis() -> SelfDualBasis {
    let w = [
        TwoForm::basis(1, 2).scale(-1.0),
        TwoForm::basis(0, 2),
        TwoForm::basis(0, 1).scale(-1.0),
    ];
    let plus = w.map(|wi| wi.add(&star(&wi)).scale(INV_SQRT2));
    let minus = w.map(|wi| wi.sub(&star(&wi)).scale(INV_SQRT2));
    SelfDualBasis { plus, minus }
}

/// Block decomposition of an operator in the canonical self-dual basis.
///
/// `B_{αβ} = R(φ+_α, φ−_β)`. Eigenvalues and singular values are ascending;
/// `frame_a[i]` is the eigenvector of `A` for `eigs_a[i]` in `φ+` coordinates,
/// likewise for `C` in `φ−` coordinates, and `B v = σ u` with `u = frame_b_left[i]`,
/// `v = frame_b_right[i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockData {
    pub a: Mat3,
    pub b: Mat3,
    pub c: Mat3,
    pub eigs_a: Vec3,
    pub eigs_c: Vec3,
    pub svals_b: Vec3,
    pub frame_a: [Vec3; 3],
    pub frame_c: [Vec3; 3],
    pub frame_b_left: [Vec3; 3],
    pub frame_b_right: [Vec3; 3],
}

/// Wire format of [`BlockData`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "eigsA")]
    pub eigs_a: Vec<f64>,
    #[serde(rename = "eigsC")]
    pub eigs_c: Vec<f64>,
    #[serde(rename = "svalsB")]
    pub svals_b: Vec<f64>,
}

fn flat(m: &Mat3) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

impl BlockData {
    pub fn to_json(&self) -> BlockJson {
        BlockJson {
            a: flat(&self.a),
            b: flat(&self.b),
            c: flat(&self.c),
            eigs_a: self.eigs_a.to_vec(),
            eigs_c: self.eigs_c.to_vec(),
            svals_b: self.svals_b.to_vec(),
        }
    }

    /// Rebuilds the operator from the three blocks.
    pub fn reassemble(&self) -> CurvatureOperator {
        assemble(&self.a, &self.b, &self.c)
    }
}

/// `Pᵀ [[A, B], [Bᵀ, C]] P` in the wedge basis.
pub fn assemble(a: &Mat3, b: &Mat3, c: &Mat3) -> CurvatureOperator {
    let p = canonical_selfdual_basis().change_of_basis();
    let m = block_matrix(a, b, c);
    let pt = linalg::transpose(&p);
    CurvatureOperator::from_matrix_symmetrized(linalg::matmul(&linalg::matmul(&pt, &m), &p))
}

fn block_matrix(a: &Mat3, b: &Mat3, c: &Mat3) -> Mat6 {
    let mut m = linalg::zeros::<6>();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[i][j];
            m[i][j + 3] = b[i][j];
            m[i + 3][j] = b[j][i];
            m[i + 3][j + 3] = c[i][j];
        }
    }
    m
}

fn split(m: &Mat6) -> (Mat3, Mat3, Mat3) {
    let a = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j]));
    let b = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j + 3]));
    let c = std::array::from_fn(|i| std::array::from_fn(|j| m[i + 3][j + 3]));
    (a, b, c)
}

/// The operator written in the `(φ+, φ−)` basis.
pub fn selfdual_matrix(r: &CurvatureOperator) -> Mat6 {
    let p = canonical_selfdual_basis().change_of_basis();
    let pr = linalg::matmul(&p, r.matrix());
    linalg::matmul(&pr, &linalg::transpose(&p))
}

pub fn decompose(r: &CurvatureOperator) -> BlockData {
    let (a, b, c) = split(&selfdual_matrix(r));
    let ea = linalg::sym_eigen(&a);
    let ec = linalg::sym_eigen(&c);
    let sb = linalg::svd3(&b);
    BlockData {
        a,
        b,
        c,
        eigs_a: ea.values,
        eigs_c: ec.values,
        svals_b: sb.values,
        frame_a: ea.vectors,
        frame_c: ec.vectors,
        frame_b_left: sb.left,
        frame_b_right: sb.right,
    }
}

/// The cofactor-type square of a symmetric 3×3 matrix `(a b c; b e f; c f k)`.
pub fn block_sharp3(s: &Mat3) -> Mat3 {
    let [[a, b, c], [_, e, f], [_, _, k]] = *s;
    [
        [e * k - f * f, c * f - b * k, b * f - c * e],
        [c * f - b * k, a * k - c * c, b * c - a * f],
        [b * f - c * e, b * c - a * f, a * e - b * b],
    ]
}

/// Structure constants of `∧+` and `∧−` in the `φ±` bases, divided by √2:
/// `[φ±_α, φ±_β] = √2 Σ_γ s±[γ][α][β] φ±_γ`.
fn selfdual_structure() -> ([[[f64; 3]; 3]; 3], [[[f64; 3]; 3]; 3]) {
    let basis = canonical_selfdual_basis();
    let project = |forms: &[TwoForm; 3]| {
        let mut s = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let br = crate::wedge::lie_bracket(&forms[a], &forms[b]);
                for (g, out) in s.iter_mut().enumerate() {
                    out[a][b] = br.dot(&forms[g]) * INV_SQRT2;
                }
            }
        }
        s
    };
    (project(&basis.plus), project(&basis.minus))
}

/// The mixed product `B#` for a block pairing `∧+` (rows) with `∧−`
/// (columns): `(B#)_{αβ} = ½ Σ s+_α^{γη} s−_β^{δθ} B_{γδ} B_{ηθ}`.
pub fn mixed_sharp(b: &Mat3) -> Mat3 {
    let (sp, sm) = selfdual_structure();
    let mut out = [[0.0; 3]; 3];
    for (al, row) in out.iter_mut().enumerate() {
        for (be, x) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for g in 0..3 {
                for h in 0..3 {
                    for d in 0..3 {
                        for t in 0..3 {
                            s += sp[al][g][h] * sm[be][d][t] * b[g][d] * b[h][t];
                        }
                    }
                }
            }
            *x = 0.5 * s;
        }
    }
    out
}

/// `‖R# − 2 [[A#, B#], [(Bᵀ)#, C#]]‖` with `R#` from the coordinate formula.
pub fn block_sharp_identity(r: &CurvatureOperator) -> f64 {
    let blocks = decompose(r);
    let a = block_sharp3(&blocks.a).map(|row| row.map(|x| 2.0 * x));
    let c = block_sharp3(&blocks.c).map(|row| row.map(|x| 2.0 * x));
    let b = mixed_sharp(&blocks.b).map(|row| row.map(|x| 2.0 * x));
    let rhs = assemble(&a, &b, &c);
    sharp_coord(r).sub(&rhs).norm()
}

/// `R − (𝓡/12)𝓘 − ½ R̊c∧g`.
pub fn weyl(r: &CurvatureOperator) -> CurvatureOperator {
    let s = scalar(r);
    let half_rc_g = kulkarni_nomizu(&traceless_ricci(r), &crate::wedge::SymmetricTwoTensor::identity())
        .scale(0.5);
    r.shift(-s / 12.0).sub(&half_rc_g)
}

/// `‖⋆W − W⋆‖` for `W = weyl(R)`.
pub fn weyl_star_commutator(r: &CurvatureOperator) -> f64 {
    let w = weyl(r);
    let s = hodge_star();
    let sw = linalg::matmul(&s, w.matrix());
    let ws = linalg::matmul(w.matrix(), &s);
    linalg::frobenius(&linalg::sub(&sw, &ws))
}

/// `| |R̊c| − 2|B| |`.
pub fn norm_identity_check(r: &CurvatureOperator) -> f64 {
    let b = decompose(r).b;
    (traceless_ricci(r).norm() - 2.0 * linalg::frobenius(&b)).abs()
}

/// Eigenvalues of the full 6×6 operator, ascending. Diagnostic only: the
/// cone conditions use the block spectra.
pub fn full_spectrum(r: &CurvatureOperator) -> [f64; 6] {
    linalg::sym_eigen(r.matrix()).values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wedge::lie_bracket;

    fn close(u: &TwoForm, v: &TwoForm) -> bool {
        u.sub(v).norm() < 1e-14
    }

    #[test]
    fn basis_brackets() {
        let b = canonical_selfdual_basis();
        let s2 = std::f64::consts::SQRT_2;
        for f in [&b.plus, &b.minus] {
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                assert!(close(&lie_bracket(&f[i], &f[j]), &f[k].scale(s2)));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!(close(&lie_bracket(&b.plus[i], &b.minus[j]), &TwoForm::ZERO));
                assert!(b.plus[i].dot(&b.minus[j]).abs() < 1e-15);
                let d = if i == j { 1.0 } else { 0.0 };
                assert!((b.plus[i].dot(&b.plus[j]) - d).abs() < 1e-15);
                assert!((b.minus[i].dot(&b.minus[j]) - d).abs() < 1e-15);
            }
            assert!(close(&star(&b.plus[i]), &b.plus[i]));
            assert!(close(&star(&b.minus[i]), &b.minus[i].scale(-1.0)));
        }
    }

    #[test]
    fn star_basics() {
        assert_eq!(star(&TwoForm::basis(0, 1)), TwoForm::basis(2, 3));
        let s = hodge_star();
        assert_eq!(linalg::matmul(&s, &s), linalg::identity());
        let ev = linalg::sym_eigen(&s).values;
        assert_eq!(ev.map(|x| x.round()), [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn identity_blocks() {
        let d = decompose(&CurvatureOperator::identity());
        for i in 0..3 {
            assert!((d.eigs_a[i] - 1.0).abs() < 1e-15);
            assert!((d.eigs_c[i] - 1.0).abs() < 1e-15);
            assert!(d.svals_b[i].abs() < 1e-15);
        }
        assert!(block_sharp_identity(&CurvatureOperator::identity()) < 1e-14);
        assert!(weyl(&CurvatureOperator::identity()).norm() < 1e-14);
    }

    #[test]
    fn sharp3_examples() {
        let d = [[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 5.0]];
        assert_eq!(block_sharp3(&d), [[15.0, 0.0, 0.0], [0.0, 10.0, 0.0], [0.0, 0.0, 6.0]]);
        let id: Mat3 = linalg::identity();
        assert_eq!(block_sharp3(&id), id);
        assert_eq!(block_sharp3(&linalg::zeros()), linalg::zeros::<3>());
    }

    #[test]
    fn mixed_sharp_is_cofactor() {
        let b = [[0.3, -1.1, 0.4], [2.0, 0.5, -0.7], [0.1, 0.9, 1.3]];
        let got = mixed_sharp(&b);
        let want = linalg::cofactor3(&b);
        for i in 0..3 {
            for j in 0..3 {
                assert!((got[i][j] - want[i][j]).abs() < 1e-13);
            }
        }
    }
}
