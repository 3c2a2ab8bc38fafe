//! Small dense linear algebra on fixed-size arrays.
//!
//! Everything in this crate lives in dimension 3, 4 or 6, so matrices are
//! plain `[[f64; N]; N]` arrays. The symmetric eigensolver is cyclic Jacobi,
//! which stays accurate for clustered and repeated eigenvalues.

pub type Mat<const N: usize> = [[f64; N]; N];
pub type Mat3 = Mat<3>;
pub type Vec3 = [f64; 3];

pub fn zeros<const N: usize>() -> Mat<N> {
    [[0.0; N]; N]
}

pub fn identity<const N: usize>() -> Mat<N> {
    let mut m = zeros::<N>();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn transpose<const N: usize>(a: &Mat<N>) -> Mat<N> {
    let mut t = zeros::<N>();
    for i in 0..N {
        for j in 0..N {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn matmul<const N: usize>(a: &Mat<N>, b: &Mat<N>) -> Mat<N> {
    let mut c = zeros::<N>();
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn matvec<const N: usize>(a: &Mat<N>, v: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = dot(&a[i], v);
    }
    out
}

/// `a^T v`
pub fn matvec_t<const N: usize>(a: &Mat<N>, v: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        for j in 0..N {
            out[j] += a[i][j] * v[i];
        }
    }
    out
}

pub fn dot<const N: usize>(u: &[f64; N], v: &[f64; N]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm<const N: usize>(u: &[f64; N]) -> f64 {
    dot(u, u).sqrt()
}

pub fn frobenius<const N: usize>(a: &Mat<N>) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn trace<const N: usize>(a: &Mat<N>) -> f64 {
    (0..N).map(|i| a[i][i]).sum()
}

pub fn sub<const N: usize>(a: &Mat<N>, b: &Mat<N>) -> Mat<N> {
    let mut c = *a;
    for i in 0..N {
        for j in 0..N {
            c[i][j] -= b[i][j];
        }
    }
    c
}

/// `v^T a w`
pub fn bilinear<const N: usize>(a: &Mat<N>, v: &[f64; N], w: &[f64; N]) -> f64 {
    dot(v, &matvec(a, w))
}

/// Flip `v` so that its largest-magnitude component is positive.
pub fn fix_sign<const N: usize>(v: &mut [f64; N]) {
    let mut best = 0;
    for i in 1..N {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone, Copy)]
pub struct SymEigen<const N: usize> {
    /// Ascending.
    pub values: [f64; N],
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: [[f64; N]; N],
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Only the upper triangle is read. Eigenvalues come back sorted ascending;
/// each eigenvector has its largest-magnitude component made positive so the
/// output is deterministic.
pub fn sym_eigen<const N: usize>(input: &Mat<N>) -> SymEigen<N> {
    let mut a = *input;
    for i in 0..N {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    let mut v = identity::<N>();
    let scale = frobenius(&a);
    if scale == 0.0 {
        return finish(a, v);
    }

    for _sweep in 0..64 {
        let off: f64 = (0..N)
            .flat_map(|p| ((p + 1)..N).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    finish(a, v)
}

fn finish<const N: usize>(a: Mat<N>, v: Mat<N>) -> SymEigen<N> {
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    // stable sort keeps the sweep order for ties
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.map(|i| a[i][i]);
    let vectors = order.map(|i| {
        let mut col: [f64; N] = std::array::from_fn(|k| v[k][i]);
        fix_sign(&mut col);
        col
    });
    SymEigen { values, vectors }
}

/// Singular value decomposition of a 3x3 matrix, `b = Σ σ_i u_i v_iᵀ`.
#[derive(Debug, Clone, Copy)]
pub struct Svd3 {
    /// Ascending, nonnegative.
    pub values: Vec3,
    /// Left singular vectors, `left[i]` pairs with `values[i]`.
    pub left: [Vec3; 3],
    /// Right singular vectors.
    pub right: [Vec3; 3],
}

/// SVD through the eigen-decomposition of `bᵀb`.
///
/// Right vectors are the sign-fixed eigenvectors of `bᵀb`; singular values
/// are recomputed as `|b v_i|` (absolute accuracy ~ ε‖b‖ instead of √ε‖b‖)
/// and left vectors as `b v_i / σ_i`, completed to an orthonormal basis where
/// `σ_i` vanishes.
pub fn svd3(b: &Mat3) -> Svd3 {
    let btb = matmul(&transpose(b), b);
    let eig = sym_eigen(&btb);
    let scale = frobenius(b);

    let right = eig.vectors;
    let mut values = [0.0; 3];
    let mut left = [[0.0; 3]; 3];
    let mut have = [false; 3];
    for i in 0..3 {
        let bv = matvec(b, &right[i]);
        let s = norm(&bv);
        values[i] = s;
        if s > 1e-12 * scale && s > 0.0 {
            left[i] = bv.map(|x| x / s);
            have[i] = true;
        }
    }

    // Sorting by |b v_i| can differ from the eigenvalue order only for
    // near-ties; keep pairs together.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let values = order.map(|i| values[i]);
    let right = order.map(|i| right[i]);
    let mut have = order.map(|i| have[i]);
    let mut left = order.map(|i| left[i]);

    // Orthonormalise the good left vectors (they are orthogonal up to
    // rounding) and complete the rest from the standard basis.
    for i in (0..3).rev() {
        if have[i] {
            for j in (i + 1)..3 {
                if have[j] {
                    let d = dot(&left[i], &left[j]);
                    for k in 0..3 {
                        left[i][k] -= d * left[j][k];
                    }
                }
            }
            let n = norm(&left[i]);
            left[i] = left[i].map(|x| x / n);
        }
    }
    for i in (0..3).rev() {
        if have[i] {
            continue;
        }
        let mut best: Option<(f64, Vec3)> = None;
        for e in 0..3 {
            let mut cand = [0.0; 3];
            cand[e] = 1.0;
            for j in 0..3 {
                if have[j] {
                    let d = dot(&cand, &left[j]);
                    for k in 0..3 {
                        cand[k] -= d * left[j][k];
                    }
                }
            }
            let n = norm(&cand);
            if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                best = Some((n, cand.map(|x| x / n)));
            }
        }
        let (_, mut u) = best.expect("three candidates");
        fix_sign(&mut u);
        left[i] = u;
        have[i] = true;
    }

    Svd3 {
        values,
        left,
        right,
    }
}

/// Cofactor ("adjugate transpose") matrix: `cof(m)_{ij} = (-1)^{i+j} det(minor_{ij})`.
pub fn cofactor3(m: &Mat3) -> Mat3 {
    let mut c = zeros::<3>();
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
            c[i][j] = m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1];
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct<const N: usize>(e: &SymEigen<N>) -> Mat<N> {
        let mut m = zeros::<N>();
        for k in 0..N {
            for i in 0..N {
                for j in 0..N {
                    m[i][j] += e.values[k] * e.vectors[k][i] * e.vectors[k][j];
                }
            }
        }
        m
    }

    #[test]
    fn jacobi_diagonal_and_repeated() {
        let e = sym_eigen(&[[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]);
        assert_eq!(e.values, [1.0, 2.0, 3.0]);
        assert_eq!(e.vectors[0], [0.0, 1.0, 0.0]);

        let e = sym_eigen(&identity::<6>());
        assert_eq!(e.values, [1.0; 6]);
    }

    #[test]
    fn jacobi_reconstructs() {
        let a = [
            [4.0, 1.0, -2.0, 0.5],
            [1.0, 2.0, 0.0, 1.0],
            [-2.0, 0.0, 3.0, -1.5],
            [0.5, 1.0, -1.5, -1.0],
        ];
        let e = sym_eigen(&a);
        let back = reconstruct(&e);
        assert!(frobenius(&sub(&back, &a)) < 1e-13);
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for i in 0..4 {
            for j in 0..4 {
                let d = dot(&e.vectors[i], &e.vectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn svd_rank_deficient() {
        let b = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 0.0]];
        let s = svd3(&b);
        assert!(s.values[0].abs() < 1e-12 && s.values[1].abs() < 1e-7);
        let mut back = zeros::<3>();
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    back[i][j] += s.values[k] * s.left[k][i] * s.right[k][j];
                }
            }
        }
        assert!(frobenius(&sub(&back, &b)) < 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&s.left[i], &s.left[j]) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn svd_zero_matrix() {
        let s = svd3(&zeros());
        assert_eq!(s.values, [0.0; 3]);
    }

    #[test]
    fn cofactor_of_diagonal() {
        let c = cofactor3(&[[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 5.0]]);
        assert_eq!(c, [[15.0, 0.0, 0.0], [0.0, 10.0, 0.0], [0.0, 0.0, 6.0]]);
    }
}
