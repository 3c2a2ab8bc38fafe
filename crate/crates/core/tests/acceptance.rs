//! Acceptance gate. Each criterion prints one PASS/FAIL line; the binary
//! exits non-zero if any criterion fails. Runs without the libtest harness so
//! the lines are never captured.

use std::time::{Duration, Instant};

use curvcone::cone::{
    flag_certificate, is_member, lower_bound_l, null_vector_verify, ricci_pinch_check,
    two_nonneg_flag, uniform_pic_check, Face,
};
use curvcone::cutoff::{build_cutoff, verify_cutoff, CutoffSpec};
use curvcone::decomposition::{assemble, block_sharp3, decompose, mixed_sharp, weyl_star_commutator};
use curvcone::flow::{integrate, invariance_monitor, l_inequality_monitor, TrajectoryConfig};
use curvcone::linalg;
use curvcone::sampling::{Sampler, SamplerConfig};
use curvcone::verify::{self, non_member_start, Suite, VerifyConfig, CUTOFF_EPS, CUTOFF_SIGMA, PARAM_SETS};
use curvcone::wedge::{barrier_q_expansion, kulkarni_nomizu, q_operator, ricci, sharp, sharp_coord};
use curvcone::{ConeParams, CurvatureOperator, SymmetricTwoTensor};

const SEED: u64 = 20_240_611;
const N: usize = 1000;

fn sampler(stream: u64) -> Sampler {
    Sampler::substream(
        SamplerConfig {
            seed: SEED,
            ..Default::default()
        },
        stream,
    )
}

fn params(eta: f64, mu: f64) -> ConeParams {
    ConeParams::new(eta, mu).unwrap()
}

struct Gate {
    failed: Vec<usize>,
}

impl Gate {
    fn report(&mut self, id: usize, ok: bool, detail: String) {
        println!("criterion {id:>2}: {} {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id);
        }
    }
}

fn within(t: Instant, limit: Duration) -> (bool, Duration) {
    let e = t.elapsed();
    (e < limit, e)
}

fn c1_lemma_a1(g: &mut Gate) {
    let t = Instant::now();
    let id = CurvatureOperator::identity();
    let exact = sharp(&id, &id) == id.scale(2.0);
    let mut worst: f64 = 0.0;
    for i in 0..N as u64 {
        let rm = sampler(i).random_bianchi();
        let half = kulkarni_nomizu(&ricci(&rm), &SymmetricTwoTensor::identity()).scale(0.5);
        let res = sharp(&rm, &id).sub(&half).add(&rm).norm();
        worst = worst.max(res / rm.norm().powi(2));
    }
    let (fast, el) = within(t, Duration::from_secs(5));
    g.report(
        1,
        exact && worst <= 1e-10 && fast,
        format!("I#I = 2I exact: {exact}, worst rel residual {worst:.2e}, {el:.2?}"),
    );
}

fn c2_dual_sharp(g: &mut Gate) {
    let mut worst: f64 = 0.0;
    for i in 0..N as u64 {
        let m = sampler(1 << 20 | i).random_symmetric();
        worst = worst.max(sharp(&m, &m).sub(&sharp_coord(&m)).norm() / m.norm().powi(2));
    }
    g.report(2, worst <= 1e-12, format!("worst rel difference {worst:.2e}"));
}

fn c3_block_sharp(g: &mut Gate) {
    let mut worst: f64 = 0.0;
    for i in 0..N as u64 {
        let rm = sampler(2 << 20 | i).random_bianchi();
        let d = decompose(&rm);
        let two = |m: &linalg::Mat3| -> linalg::Mat3 { m.map(|row| row.map(|x| 2.0 * x)) };
        let blocks = assemble(&two(&block_sharp3(&d.a)), &two(&mixed_sharp(&d.b)), &two(&block_sharp3(&d.c)));
        worst = worst.max(sharp(&rm, &rm).sub(&blocks).norm() / rm.norm().powi(2));
    }
    g.report(3, worst <= 1e-10, format!("worst rel residual {worst:.2e}"));
}

fn c4_norms(g: &mut Gate) {
    let (mut worst_norm, mut worst_weyl): (f64, f64) = (0.0, 0.0);
    for i in 0..N as u64 {
        let rm = sampler(3 << 20 | i).random_bianchi();
        let rc = curvcone::wedge::traceless_ricci(&rm);
        let b = decompose(&rm).b;
        let gap = (rc.norm() - 2.0 * linalg::frobenius(&b)).abs();
        worst_norm = worst_norm.max(gap / rm.norm());
        worst_weyl = worst_weyl.max(weyl_star_commutator(&rm) / rm.norm());
    }
    g.report(
        4,
        worst_norm <= 1e-10 && worst_weyl <= 1e-12,
        format!("|Rc0| - 2|B| worst {worst_norm:.2e}, [W, *] worst {worst_weyl:.2e}"),
    );
}

fn c5_null_vector(g: &mut Gate) {
    let t = Instant::now();
    let mut worst_slack = f64::INFINITY;
    let mut worst_ham = f64::INFINITY;
    let mut errors = 0;
    for (k, (eta, mu)) in PARAM_SETS.into_iter().enumerate() {
        let p = params(eta, mu);
        for face in Face::ALL {
            for i in 0..N as u64 {
                let stream = (4 << 20) | ((k as u64 * 3 + face.index() as u64) << 12) | i;
                let res = sampler(stream)
                    .boundary_member(&p, face)
                    .and_then(|b| Ok((b.op.norm(), null_vector_verify(&b.op, &p, face)?)));
                match res {
                    Ok((norm, rep)) => {
                        worst_slack = worst_slack.min(rep.slack / norm.powi(face.degree() + 1));
                        worst_ham = worst_ham.min(rep.hamilton_slack / norm.powi(2));
                    }
                    Err(_) => errors += 1,
                }
            }
        }
    }
    let (fast, el) = within(t, Duration::from_secs(60));
    g.report(
        5,
        errors == 0 && worst_slack >= -1e-8 && worst_ham >= -1e-10 && fast,
        format!("9000 boundary operators, worst scaled slack {worst_slack:.2e}, worst Hamilton slack {worst_ham:.2e}, {errors} errors, {el:.2?}"),
    );
}

fn c6_barrier(g: &mut Gate) {
    let mut worst: f64 = 0.0;
    for i in 0..N as u64 {
        let mut s = sampler(5 << 20 | i);
        let rm = s.random_bianchi();
        let (big, small) = (s.uniform(-5.0, 5.0), s.uniform(-5.0, 5.0));
        let lhs = q_operator(&rm.scale(big).shift(small));
        let rel = barrier_q_expansion(&rm, big, small) / lhs.norm().max(1.0);
        worst = worst.max(rel);
    }
    g.report(6, worst <= 1e-10, format!("worst rel residual {worst:.2e}"));
}

fn c7_exactness(g: &mut Gate) {
    let id = CurvatureOperator::identity();
    let traj = integrate(&id, &TrajectoryConfig::default()).unwrap();
    let worst = traj
        .samples
        .iter()
        .map(|s| {
            let exact = id.scale(1.0 / (1.0 - 6.0 * s.t));
            s.op.sub(&exact).norm() / exact.norm()
        })
        .fold(0.0, f64::max);
    let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .into_iter()
        .map(|dt| {
            let cfg = TrajectoryConfig {
                dt,
                adaptive: false,
                ..Default::default()
            };
            integrate(&id, &cfg).unwrap().last().op.sub(&id.scale(2.5)).norm()
        })
        .collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    let ok = worst <= 1e-8 && ratios.iter().all(|r| (r - 16.0).abs() <= 4.0);
    g.report(
        7,
        ok,
        format!("worst rel error {worst:.2e}, halving ratios {:.2} {:.2}", ratios[0], ratios[1]),
    );
}

fn traj_config(r0: &CurvatureOperator, p: &ConeParams) -> TrajectoryConfig {
    let t_max = 0.05f64.min(0.5 / r0.norm());
    TrajectoryConfig {
        dt: 1e-3f64.min(t_max),
        t_max,
        params: Some(*p),
        ..Default::default()
    }
}

fn c8_invariance(g: &mut Gate) {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for (k, (eta, mu)) in PARAM_SETS.into_iter().enumerate() {
        let p = params(eta, mu);
        for i in 0..100u64 {
            let r0 = sampler(6 << 20 | (k as u64) << 12 | i).random_member(&p).unwrap();
            match integrate(&r0, &traj_config(&r0, &p)) {
                Ok(tr) => worst = worst.max(invariance_monitor(&tr).1),
                Err(_) => errors += 1,
            }
        }
    }
    let (fast, el) = within(t, Duration::from_secs(120));
    g.report(
        8,
        worst <= 1e-6 && errors == 0 && fast,
        format!("300 trajectories, worst l/max(1,|R|) {worst:.2e}, {el:.2?}"),
    );
}

fn c9_l_functional(g: &mut Gate) {
    let p = params(1.0, 2.0);
    let l_minus = lower_bound_l(&CurvatureOperator::identity().scale(-1.0), &p, 1e-12).unwrap();
    let mut worst_scale: f64 = 0.0;
    let mut worst_bound = f64::INFINITY;
    for (k, (eta, mu)) in PARAM_SETS.into_iter().enumerate() {
        let p = params(eta, mu);
        for i in 0..N as u64 {
            let r = sampler(7 << 20 | (k as u64) << 12 | i).random_bianchi();
            let l = |m: &CurvatureOperator| lower_bound_l(m, &p, 1e-13 * m.norm().max(1.0)).unwrap();
            let l0 = l(&r);
            for c in [0.1, 10.0] {
                worst_scale = worst_scale.max((l(&r.scale(c)) - c * l0).abs());
            }
            worst_bound = worst_bound.min((1.0 + 2.0 / eta) * r.norm() - l0);
        }
    }
    let ok = (l_minus - 1.0).abs() <= 1e-8 && worst_scale <= 1e-6 && worst_bound >= 0.0;
    g.report(
        9,
        ok,
        format!("l(-I) = {l_minus:.12}, worst |l(cR) - c l(R)| {worst_scale:.2e}, min bound slack {worst_bound:.3}"),
    );
}

fn c10_implied(g: &mut Gate) {
    let mut worst_wpic = f64::INFINITY;
    let mut worst_flag = f64::INFINITY;
    let mut worst_sampled = f64::INFINITY;
    let mut worst_pinch = f64::INFINITY;
    let mut worst_upic = f64::INFINITY;
    for (k, (eta, mu)) in PARAM_SETS.into_iter().enumerate() {
        let p = params(eta, mu);
        for i in 0..N as u64 {
            let stream = 8 << 20 | (k as u64) << 12 | i;
            let m = sampler(stream).random_member(&p).unwrap();
            let norm = m.norm();
            let d = decompose(&m);
            let wpic = (d.eigs_a[0] + d.eigs_a[1]).min(d.eigs_c[0] + d.eigs_c[1]);
            worst_wpic = worst_wpic.min(wpic / norm);
            let cert = flag_certificate(&m);
            worst_flag = worst_flag.min(cert / norm);
            let (min, cert2) = two_nonneg_flag(&m, 64, stream);
            worst_sampled = worst_sampled.min((min - cert2) / norm);
            if eta < 9.0 / 16.0 {
                worst_pinch = worst_pinch.min(ricci_pinch_check(&m, &p).unwrap() / norm);
            }
            worst_upic = worst_upic.min(uniform_pic_check(&m, &p).unwrap() / norm);
        }
    }
    let ok = [worst_wpic, worst_flag, worst_pinch, worst_upic].iter().all(|v| *v >= -1e-10)
        && worst_sampled >= -1e-10;
    g.report(
        10,
        ok,
        format!(
            "min scaled: wpic {worst_wpic:.2e}, flag cert {worst_flag:.2e}, sampled - cert {worst_sampled:.2e}, pinch {worst_pinch:.2e}, upic {worst_upic:.2e}"
        ),
    );
}

fn c11_cutoff(g: &mut Gate) {
    let t = Instant::now();
    let mut violations = 0;
    for eps in CUTOFF_EPS {
        for sigma in CUTOFF_SIGMA {
            let c = build_cutoff(CutoffSpec {
                eps,
                sigma,
                r: 1.0,
                grid_n: 10_000,
            })
            .unwrap();
            violations += verify_cutoff(&c).violations.len();
        }
    }
    let (fast, el) = within(t, Duration::from_secs(5));
    g.report(11, violations == 0 && fast, format!("{violations} violations over 9 grids, {el:.2?}"));
}

fn c12_l_inequality(g: &mut Gate) {
    let p = params(1.0, 2.0);
    let mut worst_left = f64::INFINITY;
    let mut worst_mean = f64::INFINITY;
    let mut steps = 0;
    for i in 0..100u64 {
        let mut s = sampler(9 << 20 | i);
        let r0 = non_member_start(&mut s, &p, i % 2 == 1);
        assert!(!is_member(&r0, &p, 0.0));
        let rep = integrate(&r0, &traj_config(&r0, &p)).and_then(|t| l_inequality_monitor(&t)).unwrap();
        worst_left = worst_left.min(rep.worst_left_slack);
        worst_mean = worst_mean.min(rep.worst_slack);
        steps += rep.steps;
    }
    // the constant-curvature start where equality holds along the whole trajectory
    let cfg = TrajectoryConfig {
        params: Some(p),
        ..Default::default()
    };
    let eq = integrate(&CurvatureOperator::identity().scale(-1.0), &cfg)
        .and_then(|t| l_inequality_monitor(&t))
        .unwrap();
    g.report(
        12,
        worst_left >= 0.0 && worst_mean >= 0.0,
        format!(
            "100 non-member starts, {steps} steps, worst slack {worst_left:.2e} (mean-value form {worst_mean:.2e}); -I: mean-value {:.2e}, left endpoint {:.2e} (not gated)",
            eq.worst_slack, eq.worst_left_slack
        ),
    );
}

fn c13_determinism(g: &mut Gate) {
    let cfg = VerifyConfig {
        seed: 7,
        samples: N,
        suite: Suite::All,
        fault: None,
    };
    let a = verify::run(&cfg);
    let b = verify::run(&cfg);
    let same = a.to_json() == b.to_json();
    g.report(
        13,
        same && a.passed,
        format!("identical JSON: {same}, {} checks, suite passed: {}", a.checks.len(), a.passed),
    );
}

fn main() {
    let mut g = Gate { failed: Vec::new() };
    c1_lemma_a1(&mut g);
    c2_dual_sharp(&mut g);
    c3_block_sharp(&mut g);
    c4_norms(&mut g);
    c5_null_vector(&mut g);
    c6_barrier(&mut g);
    c7_exactness(&mut g);
    c8_invariance(&mut g);
    c9_l_functional(&mut g);
    c10_implied(&mut g);
    c11_cutoff(&mut g);
    c12_l_inequality(&mut g);
    c13_determinism(&mut g);
    if !g.failed.is_empty() {
        eprintln!("failed criteria: {:?}", g.failed);
        std::process::exit(1);
    }
}
