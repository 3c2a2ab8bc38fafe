//! The reaction ODE `dR/dt = 2Q(R)` and monitors along its trajectories.
//!
//! This is the spatially homogeneous model of the curvature evolution (the
//! Laplacian is dropped), i.e. the ODE that the tensor maximum principle
//! reduces to.

use serde::{Deserialize, Serialize};

use crate::cone::{default_l_tol, is_member, lower_bound_l, ConeParams};
use crate::decomposition::decompose;
use crate::error::{Error, Result};
use crate::wedge::{bianchi_residual, q_operator, scalar, CurvatureOperator};

pub fn reaction_rhs(r: &CurvatureOperator) -> CurvatureOperator {
    q_operator(r).scale(2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    /// Initial step (the only step when `adaptive` is off).
    pub dt: f64,
    pub t_max: f64,
    /// Local error tolerance per step, relative to `max(1, ‖R‖)`.
    pub rtol: f64,
    pub blowup_norm: f64,
    pub adaptive: bool,
    /// Parameters for the `l` and membership diagnostics; skipped when `None`.
    pub params: Option<ConeParams>,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_max: 0.1,
            rtol: 1e-10,
            blowup_norm: 1e8,
            adaptive: true,
            params: None,
        }
    }
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_max > 0.0 && self.dt <= self.t_max) {
            return Err(Error::Config(format!(
                "need 0 < dt <= t_max, got dt = {}, t_max = {}",
                self.dt, self.t_max
            )));
        }
        if !(self.rtol > 1e-14 && self.rtol < 1e-2) {
            return Err(Error::Config(format!("rtol must lie in (1e-14, 1e-2), got {}", self.rtol)));
        }
        if !(self.blowup_norm > 0.0) {
            return Err(Error::Config("blowup_norm must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub l: Option<f64>,
    pub scalar: f64,
    pub bianchi_residual: f64,
    pub member: Option<bool>,
    pub a1_plus_a2: f64,
    pub eigs_a: [f64; 3],
    pub norm: f64,
}

impl Diagnostics {
    pub fn of(r: &CurvatureOperator, params: Option<&ConeParams>) -> Self {
        let d = decompose(r);
        Diagnostics {
            l: params.and_then(|p| lower_bound_l(r, p, default_l_tol(r)).ok()),
            scalar: scalar(r),
            bianchi_residual: bianchi_residual(r),
            member: params.map(|p| is_member(r, p, 0.0)),
            a1_plus_a2: d.eigs_a[0] + d.eigs_a[1],
            eigs_a: d.eigs_a,
            norm: r.norm(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub op: CurvatureOperator,
    pub diag: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Completed,
    BlowupStopped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Completed => "completed",
            Status::BlowupStopped => "blowup-stopped",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub status: Status,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory holds the initial sample")
    }

    pub fn max_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.diag.norm).fold(0.0, f64::max)
    }
}

fn rk4_step(r: &CurvatureOperator, h: f64) -> CurvatureOperator {
    let k1 = reaction_rhs(r);
    let k2 = reaction_rhs(&r.add(&k1.scale(h / 2.0)));
    let k3 = reaction_rhs(&r.add(&k2.scale(h / 2.0)));
    let k4 = reaction_rhs(&r.add(&k3.scale(h)));
    let incr = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4);
    r.add(&incr.scale(h / 6.0))
}

/// Classical RK4. In adaptive mode each step is compared with two half
/// steps; the half-step result is kept when the difference is within
/// `rtol·max(1, ‖R‖)`, the step is halved otherwise and doubled after
/// comfortably small differences.
pub fn integrate(r0: &CurvatureOperator, cfg: &TrajectoryConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let params = cfg.params.as_ref();
    let mut samples = vec![Sample {
        t: 0.0,
        op: *r0,
        diag: Diagnostics::of(r0, params),
    }];
    let mut r = *r0;
    let mut t = 0.0;
    let mut h = cfg.dt;
    let mut status = Status::Completed;
    if r.norm() >= cfg.blowup_norm {
        status = Status::BlowupStopped;
    }
    while status == Status::Completed && t < cfg.t_max {
        let remaining = cfg.t_max - t;
        // avoid a sliver of a final step
        let step = if remaining <= h * (1.0 + 1e-9) { remaining } else { h };
        let next = if cfg.adaptive {
            let full = rk4_step(&r, step);
            let half = rk4_step(&rk4_step(&r, step / 2.0), step / 2.0);
            let err = half.sub(&full).norm() / 15.0;
            let tol = cfg.rtol * half.norm().max(1.0);
            if !(err <= tol) {
                h = step / 2.0;
                if h < 1e-15 * t.max(1.0) {
                    return Err(Error::StepUnderflow { t, dt: h });
                }
                continue;
            }
            if err < tol / 64.0 && step == h {
                h *= 2.0;
            }
            half
        } else {
            rk4_step(&r, step)
        };
        t = if step == remaining { cfg.t_max } else { t + step };
        r = next;
        samples.push(Sample {
            t,
            op: r,
            diag: Diagnostics::of(&r, params),
        });
        if !r.norm().is_finite() || r.norm() >= cfg.blowup_norm {
            status = Status::BlowupStopped;
        }
    }
    Ok(Trajectory { samples, status })
}

/// Largest `l(R(t))` and largest `l(R(t)) / max(1, ‖R(t)‖)` along a trajectory
/// integrated with cone parameters.
pub fn invariance_monitor(traj: &Trajectory) -> (f64, f64) {
    traj.samples.iter().fold((0.0, 0.0), |(m, rel), s| {
        let l = s.diag.l.unwrap_or(f64::INFINITY);
        (f64::max(m, l), f64::max(rel, l / s.diag.norm.max(1.0)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LInequalityReport {
    /// `min_i [max(b_i, b_{i+1}) + tol_i − D⁺l(t_i)]` with `b = 𝓡l + 6l²`.
    pub worst_slack: f64,
    /// `min_i [b_i + tol_i − D⁺l(t_i)]`, the bound evaluated at the left end
    /// only. Fails by `O(dt)` on trajectories where equality holds and `l` is
    /// convex, such as `R = c𝓘` with `c < 0`; reported for information.
    pub worst_left_slack: f64,
    pub worst_index: usize,
    pub steps: usize,
}

/// Forward difference quotients of `l` against `𝓡l + 6l²` with slack
/// `tol_i = 1e-3·(1 + ‖R(t_i)‖³)·(t_{i+1} − t_i)`.
///
/// Over a step the quotient equals the mean of `dl/dt`, so it is compared
/// with the larger of the two endpoint values of the bound.
pub fn l_inequality_monitor(traj: &Trajectory) -> Result<LInequalityReport> {
    let mut report = LInequalityReport {
        worst_slack: f64::INFINITY,
        worst_left_slack: f64::INFINITY,
        worst_index: 0,
        steps: 0,
    };
    let bound = |s: &Sample, l: f64| s.diag.scalar * l + 6.0 * l * l;
    for (i, w) in traj.samples.windows(2).enumerate() {
        let (s0, s1) = (&w[0], &w[1]);
        let (l0, l1) = match (s0.diag.l, s1.diag.l) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Precondition("trajectory lacks l diagnostics".into())),
        };
        let dt = s1.t - s0.t;
        let dl = (l1 - l0) / dt;
        let tol = 1e-3 * (1.0 + s0.diag.norm.powi(3)) * dt;
        let b0 = bound(s0, l0);
        let slack = b0.max(bound(s1, l1)) + tol - dl;
        let left = b0 + tol - dl;
        if slack < report.worst_slack {
            report.worst_slack = slack;
            report.worst_index = i;
        }
        report.worst_left_slack = report.worst_left_slack.min(left);
        report.steps += 1;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongMaxReport {
    pub worst_slack: f64,
    /// Fraction of steps with slack `≥ 0`.
    pub pass_fraction: f64,
    pub steps: usize,
}

/// Forward differences of `A1 + A2` against `2(A1+A2)(2A3 + A1)` with slack
/// `1e-3·(1 + ‖R‖³)·dt`. Advisory only: eigenvalue sums are merely Lipschitz.
pub fn strong_max_monitor(traj: &Trajectory) -> StrongMaxReport {
    let mut worst = f64::INFINITY;
    let mut ok = 0usize;
    let mut steps = 0usize;
    for w in traj.samples.windows(2) {
        let (s0, s1) = (&w[0], &w[1]);
        let dt = s1.t - s0.t;
        let x0 = s0.diag.a1_plus_a2;
        let a = s0.diag.eigs_a;
        let rhs = 2.0 * x0 * (2.0 * a[2] + a[0]);
        let tol = 1e-3 * (1.0 + s0.diag.norm.powi(3)) * dt;
        let slack = (s1.diag.a1_plus_a2 - x0) / dt - rhs + tol;
        worst = worst.min(slack);
        if slack >= 0.0 {
            ok += 1;
        }
        steps += 1;
    }
    StrongMaxReport {
        worst_slack: worst,
        pass_fraction: if steps == 0 { 1.0 } else { ok as f64 / steps as f64 },
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        let id = CurvatureOperator::identity();
        assert_eq!(reaction_rhs(&id), id.scale(6.0));
        assert_eq!(reaction_rhs(&CurvatureOperator::zero()), CurvatureOperator::zero());
    }

    #[test]
    fn identity_closed_form() {
        let cfg = TrajectoryConfig::default();
        let traj = integrate(&CurvatureOperator::identity(), &cfg).unwrap();
        assert_eq!(traj.status, Status::Completed);
        for s in &traj.samples {
            let c = 1.0 / (1.0 - 6.0 * s.t);
            let err = s.op.sub(&CurvatureOperator::identity().scale(c)).norm() / (c * 6f64.sqrt());
            assert!(err < 1e-8, "t = {}, err = {err}", s.t);
        }
        assert_eq!(traj.last().t, 0.1);
    }

    #[test]
    fn zero_stays_zero() {
        let traj = integrate(&CurvatureOperator::zero(), &TrajectoryConfig::default()).unwrap();
        assert!(traj.samples.iter().all(|s| s.op == CurvatureOperator::zero()));
    }

    #[test]
    fn blowup_is_reported() {
        let cfg = TrajectoryConfig {
            t_max: 1.0,
            ..Default::default()
        };
        let traj = integrate(&CurvatureOperator::identity(), &cfg).unwrap();
        assert_eq!(traj.status, Status::BlowupStopped);
        assert!(traj.last().t < 1.0 / 6.0);
    }
}
