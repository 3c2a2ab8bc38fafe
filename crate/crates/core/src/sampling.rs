//! Seeded generators for operators, cone members, boundary operators and
//! frames.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). A sampler
//! for `(seed, index)` is `ChaCha8Rng::seed_from_u64(seed)` with its stream
//! set to `index`, so each sample of a suite owns an independent substream
//! and results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cone::{hat_f, is_member, ConeParams, Face, FrameOctet};
use crate::decomposition::{assemble, decompose, SelfDualBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, Vec3};
use crate::wedge::{CurvatureOperator, Mat4};

const MAX_TRIES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub scale: f64,
    pub margin: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            scale: 1.0,
            margin: 0.1,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!("scale must be positive, got {}", self.scale)));
        }
        if !(self.margin > 0.0 && self.margin < 1.0) {
            return Err(Error::Config(format!("margin must lie in (0, 1), got {}", self.margin)));
        }
        Ok(())
    }
}

/// A random stream plus the sampling configuration.
pub struct Sampler {
    pub cfg: SamplerConfig,
    rng: ChaCha8Rng,
}

/// An operator on a named face of the cone, with the three closed-form values
/// at the returned operator as certificate.
#[derive(Debug, Clone, Copy)]
pub struct BoundarySample {
    pub op: CurvatureOperator,
    pub face: Face,
    pub hat: [f64; 3],
}

impl Sampler {
    /// Stream 0 of `cfg.seed`.
    pub fn new(cfg: SamplerConfig) -> Self {
        Self::substream(cfg, 0)
    }

    pub fn substream(cfg: SamplerConfig, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(index);
        Self { cfg, rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    fn gaussian_vec<const N: usize>(&mut self) -> [f64; N] {
        std::array::from_fn(|_| self.gaussian())
    }

    /// Symmetric 6×6 with independent N(0, scale²) upper-triangle entries.
    /// Does not satisfy the Bianchi identity.
    pub fn random_symmetric(&mut self) -> CurvatureOperator {
        let s = self.cfg.scale;
        let upper: Vec<f64> = (0..21).map(|_| s * self.gaussian()).collect();
        CurvatureOperator::from_upper(&upper).expect("21 finite entries")
    }

    pub fn random_bianchi(&mut self) -> CurvatureOperator {
        self.random_symmetric().project_bianchi()
    }

    /// Orthonormal rows from Gram–Schmidt on Gaussian draws.
    fn orthonormal_rows<const N: usize>(&mut self, k: usize) -> Vec<[f64; N]> {
        loop {
            let mut rows: Vec<[f64; N]> = Vec::with_capacity(k);
            let mut ok = true;
            for _ in 0..k {
                let mut v: [f64; N] = self.gaussian_vec();
                for _ in 0..2 {
                    for r in &rows {
                        let d = linalg::dot(&v, r);
                        for (x, y) in v.iter_mut().zip(r) {
                            *x -= d * y;
                        }
                    }
                }
                let n = linalg::norm(&v);
                if n < 1e-8 {
                    ok = false;
                    break;
                }
                rows.push(v.map(|x| x / n));
            }
            if ok {
                return rows;
            }
        }
    }

    /// Haar-distributed rotation in SO(N).
    pub fn random_rotation<const N: usize>(&mut self) -> [[f64; N]; N] {
        let rows = self.orthonormal_rows::<N>(N);
        let mut q: [[f64; N]; N] = std::array::from_fn(|i| rows[i]);
        if det(&q) < 0.0 {
            q[0] = q[0].map(|x| -x);
        }
        q
    }

    pub fn random_rotation4(&mut self) -> Mat4 {
        self.random_rotation::<4>()
    }

    /// Three orthonormal vectors of ℝ⁴.
    pub fn random_3frame(&mut self) -> [[f64; 4]; 3] {
        let rows = self.orthonormal_rows::<4>(3);
        [rows[0], rows[1], rows[2]]
    }

    /// Four independent orthonormal pairs, two in `∧+` and two in `∧−`.
    pub fn random_frame_octet(&mut self, basis: &SelfDualBasis) -> FrameOctet {
        let mut xi = [crate::wedge::TwoForm::ZERO; 8];
        for pair in 0..4 {
            let rows = self.orthonormal_rows::<3>(2);
            for k in 0..2 {
                xi[2 * pair + k] = if pair < 2 {
                    basis.plus_form(&rows[k])
                } else {
                    basis.minus_form(&rows[k])
                };
            }
        }
        FrameOctet::new(xi).expect("Gram-Schmidt output is a valid octet")
    }

    /// A strictly interior member of `𝔠_{η,μ}` (requires `η > 0`).
    ///
    /// With `m = margin`, `x = A1+A2 ∈ [m, 1]·scale`, `A2+A3 ≤ x + (1−m)(μ−1)x`
    /// (so `F̂² ≥ m(μ−1)x`), the same for `C` after matching traces, and `B`
    /// scaled so `(B2+B3)² = u(1−m)η(A1+A2)(C1+C2)` with `u` uniform in
    /// `[0, 1]` (so `F̂¹ ≥ mη(A1+A2)(C1+C2)`).
    pub fn random_member(&mut self, params: &ConeParams) -> Result<CurvatureOperator> {
        if params.eta <= 0.0 {
            return Err(Error::Precondition("random_member needs eta > 0".into()));
        }
        let m = self.cfg.margin;
        let mut last = String::new();
        for _ in 0..MAX_TRIES {
            let a = self.sorted_block_eigs(params.mu);
            let c0 = self.sorted_block_eigs(params.mu);
            let (ta, tc) = (a.iter().sum::<f64>(), c0.iter().sum::<f64>());
            let mut c = c0.map(|x| x * ta / tc);
            let shift = (ta - c.iter().sum::<f64>()) / 3.0;
            c = c.map(|x| x + shift);
            let (x, y) = (a[0] + a[1], c[0] + c[1]);
            let f2 = params.mu * x - (a[1] + a[2]);
            let f3 = params.mu * y - (c[1] + c[2]);
            let bound = |s: f64| m * (params.mu - 1.0) * s;
            if !(c[0] <= c[1] && c[1] <= c[2] && f2 >= bound(x) * 0.999 && f3 >= bound(y) * 0.999)
            {
                last = format!("eigs A={a:?} C={c:?} failed the margin re-check");
                continue;
            }
            let g: Mat3 = std::array::from_fn(|_| self.gaussian_vec());
            let sv = linalg::svd3(&g).values;
            let top = sv[1] + sv[2];
            if top < 1e-12 {
                last = "degenerate B draw".into();
                continue;
            }
            let u = self.uniform(0.0, 1.0);
            let target = (u * (1.0 - m) * params.eta * x * y).sqrt();
            let b = g.map(|row| row.map(|v| v * target / top));
            let qa = self.random_rotation::<3>();
            let qc = self.random_rotation::<3>();
            let r = assemble(&conjugate(&qa, &a), &b, &conjugate(&qc, &c)).project_bianchi();
            if is_member(&r, params, 0.0) {
                return Ok(r);
            }
            last = format!("assembled operator failed membership: {}", r.to_json());
        }
        Err(Error::RetryExhausted {
            tries: MAX_TRIES,
            reason: last,
        })
    }

    /// Sorted triple with `x = e1+e2 ∈ [m, 1]·scale` and
    /// `e2+e3 ∈ [x, x + (1−m)(μ−1)x]`.
    fn sorted_block_eigs(&mut self, mu: f64) -> Vec3 {
        let m = self.cfg.margin;
        let s = self.cfg.scale;
        let x = s * self.uniform(m, 1.0);
        let w = self.uniform(x, x + (1.0 - m) * (mu - 1.0) * x);
        let e2 = self.uniform(x / 2.0, w / 2.0);
        [x - e2, e2, w - e2]
    }

    /// A member whose named closed-form value vanishes, found by bisection
    /// along a face-specific path from an interior member: `B ↦ tB` for
    /// `F1`, `(A1, A3) ↦ (A1 − s, A3 + s)` for `F2`, the same on `C` for `F3`.
    /// For `F2`/`F3` the block `B` is shrunk first if needed so that `F̂¹`
    /// stays positive along the path.
    pub fn boundary_member(&mut self, params: &ConeParams, face: Face) -> Result<BoundarySample> {
        let mut last = String::new();
        for _ in 0..MAX_TRIES {
            let r = self.random_member(params)?;
            let d = decompose(&r);
            let a = eig_matrix(&d.frame_a, &d.eigs_a);
            let c = eig_matrix(&d.frame_c, &d.eigs_c);
            let norm = r.norm();
            let deg = if face == Face::F1 { 2 } else { 1 };
            let tol = 1e-11 * norm.powi(deg);
            let found = match face {
                Face::F1 => {
                    let build = |t: f64| assemble(&d.a, &d.b.map(|row| row.map(|v| t * v)), &d.c);
                    let z = d.svals_b[1] + d.svals_b[2];
                    if z < 1e-6 * norm {
                        last = "B too small to inflate".into();
                        continue;
                    }
                    let x = d.eigs_a[0] + d.eigs_a[1];
                    let y = d.eigs_c[0] + d.eigs_c[1];
                    let t_star = (params.eta * x * y).sqrt() / z;
                    bisect_face(build, params, face, 1.0, 2.0 * t_star + 1.0, tol)
                }
                Face::F2 | Face::F3 => {
                    let (frame, eigs) = if face == Face::F2 {
                        (&d.frame_a, d.eigs_a)
                    } else {
                        (&d.frame_c, d.eigs_c)
                    };
                    let x = eigs[0] + eigs[1];
                    let f = params.mu * x - (eigs[1] + eigs[2]);
                    let s_star = f / (params.mu + 1.0);
                    // at the far end x drops to x - s_star; keep F1 ≥ 0 there
                    let x_end = x - s_star;
                    let (xa, xc) = if face == Face::F2 {
                        (x_end, d.eigs_c[0] + d.eigs_c[1])
                    } else {
                        (d.eigs_a[0] + d.eigs_a[1], x_end)
                    };
                    let z = d.svals_b[1] + d.svals_b[2];
                    let cap = (params.eta * xa * xc).sqrt();
                    let tb = if z > cap { (1.0 - self.cfg.margin) * cap / z } else { 1.0 };
                    let b = d.b.map(|row| row.map(|v| tb * v));
                    let build = |s: f64| {
                        let moved = eig_matrix(frame, &[eigs[0] - s, eigs[1], eigs[2] + s]);
                        if face == Face::F2 {
                            assemble(&moved, &b, &c)
                        } else {
                            assemble(&a, &b, &moved)
                        }
                    };
                    bisect_face(build, params, face, 0.0, 2.0 * s_star + norm, tol)
                }
            };
            match found {
                Ok(op) => {
                    let op = op.project_bianchi();
                    let hat = hat_f(&op, params);
                    let val = hat[face.index()];
                    if is_member(&op, params, 0.0) && val <= tol * 10.0 {
                        return Ok(BoundarySample { op, face, hat });
                    }
                    last = format!("projected boundary point left the face: {hat:?}");
                }
                Err(e) => last = e.to_string(),
            }
        }
        Err(Error::Bisection(last))
    }
}

/// Bisection for the last member along `t ↦ build(t)` with the named face
/// value in `[0, tol]`. `lo` must be a member and `hi` must not be.
fn bisect_face<F>(build: F, params: &ConeParams, face: Face, mut lo: f64, mut hi: f64, tol: f64) -> Result<CurvatureOperator>
where
    F: Fn(f64) -> CurvatureOperator,
{
    let value = |t: f64| {
        let r = build(t);
        let h = hat_f(&r, params);
        let ok = h.iter().all(|v| *v >= 0.0);
        (r, ok, h[face.index()])
    };
    let (mut best, ok_lo, _) = value(lo);
    if !ok_lo {
        return Err(Error::Bisection("path start is not a member".into()));
    }
    if value(hi).1 {
        return Err(Error::Bisection("path end is still a member".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (r, ok, f) = value(mid);
        if ok {
            lo = mid;
            best = r;
            if f <= tol {
                return Ok(best);
            }
        } else {
            hi = mid;
        }
    }
    let f = hat_f(&best, params)[face.index()];
    if f <= tol {
        Ok(best)
    } else {
        Err(Error::Bisection(format!("face value stalled at {f:e} > {tol:e}")))
    }
}

/// `Σ λ_i v_i v_iᵀ`
fn eig_matrix(vectors: &[Vec3; 3], values: &Vec3) -> Mat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).map(|k| values[k] * vectors[k][i] * vectors[k][j]).sum())
    })
}

/// `Q diag(d) Qᵀ`
fn conjugate(q: &Mat3, d: &Vec3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| q[i][k] * d[k] * q[j][k]).sum()))
}

fn det<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    // Gaussian elimination with partial pivoting
    let mut a = *m;
    let mut d = 1.0;
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty");
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        d *= a[col][col];
        for r in col + 1..N {
            let f = a[r][col] / a[col][col];
            for k in col..N {
                a[r][k] -= f * a[col][k];
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::canonical_selfdual_basis;

    #[test]
    fn same_seed_same_stream() {
        let cfg = SamplerConfig {
            seed: 42,
            ..Default::default()
        };
        let a = Sampler::new(cfg).random_bianchi();
        let b = Sampler::new(cfg).random_bianchi();
        assert_eq!(a.to_json(), b.to_json());
        let c = Sampler::substream(cfg, 1).random_bianchi();
        assert_ne!(a, c);
    }

    #[test]
    fn rotations_are_special_orthogonal() {
        let mut s = Sampler::new(SamplerConfig::default());
        for _ in 0..20 {
            let q = s.random_rotation4();
            let qqt = linalg::matmul(&q, &linalg::transpose(&q));
            assert!(linalg::frobenius(&linalg::sub(&qqt, &linalg::identity())) < 1e-13);
            assert!((det(&q) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn octets_and_frames_are_orthonormal() {
        let basis = canonical_selfdual_basis();
        let mut s = Sampler::new(SamplerConfig::default());
        for _ in 0..100 {
            assert!(FrameOctet::new(s.random_frame_octet(&basis).xi).is_ok());
            let f = s.random_3frame();
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((linalg::dot(&f[i], &f[j]) - want).abs() < 1e-12);
                }
            }
        }
    }
}
