//! Cutoff functions `φ(x) = ψ((x − r)/σ)^{1/ε}` with certified derivative
//! bounds.
//!
//! The base profile `ψ` is `1` on `(−∞, 0]`, `0` on `[1, ∞)` and `1 − G` in
//! between, where the slope `g = G'` is a C¹ trapezoid: `g'` ramps linearly
//! from `0` to `s` over `[0, δ]`, stays at `s`, ramps back to `0` over
//! `[a − δ, a]`, after which `g` sits at its plateau `h = s(a − δ)` until the
//! mirrored descent on `[1 − a, 1]`. The unit-mass condition `h(1 − a) = 1`
//! fixes `a`. With `δ = 0.02` and `s = 4.8` this gives `|ψ'| ≤ h ≈ 1.50` and
//! `|ψ''| ≤ 4.8`, and `ψ` is C² (piecewise cubic).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseProfile {
    delta: f64,
    s: f64,
    a: f64,
    h: f64,
}

const SELF_CHECK_GRID: usize = 10_000;

impl BaseProfile {
    pub fn new(delta: f64, s: f64) -> Result<Self> {
        let b = 1.0 + delta;
        let disc = b * b - 4.0 * (delta + 1.0 / s);
        if !(delta > 0.0 && s > 0.0 && disc >= 0.0) {
            return Err(Error::Cutoff(format!("no profile with delta = {delta}, s = {s}")));
        }
        let a = 0.5 * (b - disc.sqrt());
        if !(a >= 2.0 * delta && a <= 0.5) {
            return Err(Error::Cutoff(format!("ramp length {a} out of range")));
        }
        let p = Self {
            delta,
            s,
            a,
            h: s * (a - delta),
        };
        p.self_check()?;
        Ok(p)
    }

    pub fn max_slope(&self) -> f64 {
        self.h
    }

    pub fn max_curvature(&self) -> f64 {
        self.s
    }

    /// `(g', g, G)` on `[0, ½]`.
    fn left_half(&self, x: f64) -> (f64, f64, f64) {
        let Self { delta: d, s, a, h } = *self;
        if x <= d {
            (s * x / d, s * x * x / (2.0 * d), s * x.powi(3) / (6.0 * d))
        } else if x <= a - d {
            let u = x - d;
            (s, s * d / 2.0 + s * u, s * d * d / 6.0 + s * d / 2.0 * u + s * u * u / 2.0)
        } else if x <= a {
            let u = a - x;
            (
                s * u / d,
                h - s * u * u / (2.0 * d),
                h * a / 2.0 - (h * u - s * u.powi(3) / (6.0 * d)),
            )
        } else {
            (0.0, h, h * a / 2.0 + h * (x - a))
        }
    }

    /// `(ψ, ψ', ψ'')` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        if x <= 0.0 {
            return (1.0, 0.0, 0.0);
        }
        if x >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let (dg, g, big_g) = if x <= 0.5 {
            self.left_half(x)
        } else {
            let (dg, g, big_g) = self.left_half(1.0 - x);
            (-dg, g, 1.0 - big_g)
        };
        ((1.0 - big_g).clamp(0.0, 1.0), -g, -dg)
    }

    fn self_check(&self) -> Result<()> {
        let (p0, _, _) = self.eval(0.0);
        let (p1, _, _) = self.eval(1.0);
        if p0 != 1.0 || p1 != 0.0 {
            return Err(Error::Cutoff("boundary values".into()));
        }
        let mut prev = 1.0;
        for i in 0..=SELF_CHECK_GRID {
            let x = i as f64 / SELF_CHECK_GRID as f64;
            let (p, dp, ddp) = self.eval(x);
            if !(dp <= 0.0 && dp >= -2.0 && ddp.abs() <= 5.0 && p <= prev) {
                return Err(Error::Cutoff(format!("bound fails at x = {x}: {p} {dp} {ddp}")));
            }
            prev = p;
        }
        // continuity of ψ and ψ' across the break points
        let d = self.delta;
        for x in [d, self.a - d, self.a, 0.5, 1.0 - self.a, 1.0 - self.a + d, 1.0 - d] {
            let (l, r) = (self.eval(x - 1e-12), self.eval(x + 1e-12));
            if (l.0 - r.0).abs() > 1e-10 || (l.1 - r.1).abs() > 1e-10 {
                return Err(Error::Cutoff(format!("discontinuity at {x}")));
            }
        }
        Ok(())
    }
}

impl Default for BaseProfile {
    fn default() -> Self {
        Self::new(0.02, 4.8).expect("default profile passes its self-check")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub eps: f64,
    pub sigma: f64,
    pub r: f64,
    pub grid_n: usize,
}

impl CutoffSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::Config(format!("eps must lie in (0, 1], got {}", self.eps)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !self.r.is_finite() {
            return Err(Error::Config("r must be finite".into()));
        }
        if self.grid_n < 2 {
            return Err(Error::Config("grid needs at least 2 points".into()));
        }
        Ok(())
    }

    /// Grid point `i` of `[r − σ, r + 2σ]`.
    pub fn grid_point(&self, i: usize) -> f64 {
        self.r - self.sigma + 3.0 * self.sigma * i as f64 / (self.grid_n - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub spec: CutoffSpec,
    pub base: BaseProfile,
}

pub fn build_cutoff(spec: CutoffSpec) -> Result<Cutoff> {
    spec.validate()?;
    Ok(Cutoff {
        spec,
        base: BaseProfile::default(),
    })
}

impl Cutoff {
    /// `(φ, φ', φ'')` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let CutoffSpec { eps, sigma, r, .. } = self.spec;
        // decide the flat pieces in x itself so rounding in (x − r)/σ cannot leak
        if x <= r {
            return (1.0, 0.0, 0.0);
        }
        if x >= r + sigma {
            return (0.0, 0.0, 0.0);
        }
        let (p, dp, ddp) = self.base.eval((x - r) / sigma);
        if p == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let k = 1.0 / eps;
        let phi = p.powf(k);
        let d1 = p.powf(k - 1.0) * dp / (eps * sigma);
        let d2 = p.powf(k - 2.0) * ((1.0 - eps) * dp * dp + eps * p * ddp) / (eps * eps * sigma * sigma);
        (phi, d1, d2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub x: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub spec: CutoffSpec,
    pub points: usize,
    pub violations: Vec<Violation>,
    /// Largest `|φ'| / (2φ^{1−ε}/(εσ))` over points with `φ > 0`.
    pub worst_ratio_first: f64,
    /// Largest `|φ''| / (5φ^{1−2ε}/(ε²σ²))` over points with `φ > 0`.
    pub worst_ratio_second: f64,
}

impl CutoffReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks on every grid point: (i) `φ = 1` for `x ≤ r`, (ii) `φ = 0` for
/// `x ≥ r + σ`, (iii) `0 ≥ φ' ≥ −2φ^{1−ε}/(εσ)`, (iv)
/// `|φ''| ≤ 5φ^{1−2ε}/(ε²σ²)`. Sign and flatness conditions are exact; the
/// magnitude bounds get `1e-12` relative slack.
pub fn verify_cutoff(c: &Cutoff) -> CutoffReport {
    let CutoffSpec { eps, sigma, r, grid_n } = c.spec;
    let per_point: Vec<(Vec<Violation>, f64, f64)> = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let x = c.spec.grid_point(i);
            let (phi, d1, d2) = c.eval(x);
            let mut v = Vec::new();
            let mut push = |condition: &str, value: f64, bound: f64| {
                v.push(Violation {
                    condition: condition.to_string(),
                    x,
                    value,
                    bound,
                })
            };
            if x <= r && phi != 1.0 {
                push("(i) phi = 1 on (-inf, r]", phi, 1.0);
            }
            if x >= r + sigma && phi != 0.0 {
                push("(ii) phi = 0 on [r + sigma, inf)", phi, 0.0);
            }
            if !(0.0..=1.0).contains(&phi) {
                push("phi in [0, 1]", phi, 1.0);
            }
            if d1 > 0.0 {
                push("(iii) phi' <= 0", d1, 0.0);
            }
            let b1 = 2.0 * phi.powf(1.0 - eps) / (eps * sigma);
            if -d1 > b1 * (1.0 + 1e-12) {
                push("(iii) phi' >= -2 phi^(1-eps) / (eps sigma)", d1, -b1);
            }
            let b2 = 5.0 * phi.powf(1.0 - 2.0 * eps) / (eps * eps * sigma * sigma);
            if d2.abs() > b2 * (1.0 + 1e-12) {
                push("(iv) |phi''| <= 5 phi^(1-2 eps) / (eps^2 sigma^2)", d2, b2);
            }
            let (r1, r2) = if phi > 0.0 {
                (d1.abs() / b1, d2.abs() / b2)
            } else {
                (0.0, 0.0)
            };
            (v, r1, r2)
        })
        .collect();
    let mut report = CutoffReport {
        spec: c.spec,
        points: grid_n,
        violations: Vec::new(),
        worst_ratio_first: 0.0,
        worst_ratio_second: 0.0,
    };
    for (v, r1, r2) in per_point {
        report.violations.extend(v);
        report.worst_ratio_first = report.worst_ratio_first.max(r1);
        report.worst_ratio_second = report.worst_ratio_second.max(r2);
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremVariantReport {
    /// Smallest `C₀ ≥ 1` with `|φ'|² ≤ C₀φ^{2−ε}/(4ε²σ²)` and
    /// `|φ''| ≤ C₀φ^{1−ε}/(2ε²σ²)` at every grid point.
    pub c0: f64,
    pub c0_first: f64,
    pub c0_second: f64,
}

/// The constant for the alternative exponents. Both ratios reduce to
/// functions of the base profile (`4ψ'²/ψ` and `2|(1−ε)ψ'²/ψ + εψ''|`), so
/// the result does not depend on `σ` or `r` beyond where the grid falls.
pub fn theorem_variant_check(c: &Cutoff) -> TheoremVariantReport {
    let CutoffSpec { eps, sigma, grid_n, .. } = c.spec;
    let (first, second) = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let x = c.spec.grid_point(i);
            let (phi, d1, d2) = c.eval(x);
            if phi <= 0.0 {
                return (0.0, 0.0);
            }
            let e2s2 = eps * eps * sigma * sigma;
            (
                d1 * d1 * 4.0 * e2s2 / phi.powf(2.0 - eps),
                d2.abs() * 2.0 * e2s2 / phi.powf(1.0 - eps),
            )
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    TheoremVariantReport {
        c0: first.max(second).max(1.0),
        c0_first: first,
        c0_second: second,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_profile_endpoints_and_bounds() {
        let p = BaseProfile::default();
        assert_eq!(p.eval(0.0).0, 1.0);
        assert_eq!(p.eval(1.0).0, 0.0);
        assert!((p.eval(0.5).0 - 0.5).abs() < 1e-15);
        assert!(p.max_slope() <= 2.0 && p.max_curvature() <= 5.0);
    }

    #[test]
    fn smoothstep_parameters_rejected() {
        assert!(BaseProfile::new(0.02, 1.0).is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let p = BaseProfile::default();
        let h = 1e-6;
        // offset keeps the stencil off the break points
        for i in 0..199 {
            let x = (i as f64 + 0.37) / 200.0;
            let (_, d1, d2) = p.eval(x);
            let fd1 = (p.eval(x + h).0 - p.eval(x - h).0) / (2.0 * h);
            let fd2 = (p.eval(x + h).1 - p.eval(x - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-6, "x = {x}");
            assert!((d2 - fd2).abs() < 1e-5, "x = {x}");
        }
    }

    #[test]
    fn eps_one_is_the_base_case() {
        let c = build_cutoff(CutoffSpec {
            eps: 1.0,
            sigma: 1.0,
            r: 0.0,
            grid_n: 1000,
        })
        .unwrap();
        assert_eq!(c.eval(0.0).0, 1.0);
        assert_eq!(c.eval(1.0).0, 0.0);
        assert!(verify_cutoff(&c).passed());
        assert!(theorem_variant_check(&c).c0.is_finite());
    }
}
