use curvcone::cone::{
    check_report, hat_f, is_member, lower_bound_l, null_vector_verify, sampled_inf, shifted_membership,
    Face,
};
use curvcone::decomposition::assemble;
use curvcone::linalg::Mat3;
use curvcone::sampling::{Sampler, SamplerConfig};
use curvcone::{ConeParams, CurvatureOperator, Error};
use proptest::prelude::*;

fn conj(q: &Mat3, d: &[f64; 3]) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| q[i][k] * d[k] * q[j][k]).sum()))
}

/// Operator with prescribed ascending spectra in random frames.
fn planted(seed: u64, ea: [f64; 3], ec: [f64; 3], sv: [f64; 3]) -> CurvatureOperator {
    let mut s = Sampler::new(SamplerConfig {
        seed,
        ..Default::default()
    });
    let (qa, qc, u, v): (Mat3, Mat3, Mat3, Mat3) = (
        s.random_rotation::<3>(),
        s.random_rotation::<3>(),
        s.random_rotation::<3>(),
        s.random_rotation::<3>(),
    );
    let b: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| u[i][k] * sv[k] * v[j][k]).sum()));
    assemble(&conj(&qa, &ea), &b, &conj(&qc, &ec))
}

/// Closed form of `l` from the spectra: each face gives a linear or
/// quadratic condition on the shift.
fn oracle_l(p: &ConeParams, ea: [f64; 3], ec: [f64; 3], sv: [f64; 3]) -> f64 {
    let (x, y, z) = (ea[0] + ea[1], ec[0] + ec[1], sv[1] + sv[2]);
    let f2 = p.mu * x - (ea[1] + ea[2]);
    let f3 = p.mu * y - (ec[1] + ec[2]);
    let quad = (-(x + y) + ((x - y).powi(2) + 4.0 * z * z / p.eta).sqrt()) / 4.0;
    [0.0, -f2 / (2.0 * (p.mu - 1.0)), -f3 / (2.0 * (p.mu - 1.0)), quad]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

fn sorted3(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn spectra() -> impl Strategy<Value = ([f64; 3], [f64; 3], [f64; 3])> {
    (
        prop::array::uniform3(-3.0f64..3.0),
        prop::array::uniform2(-3.0f64..3.0),
        prop::array::uniform3(0.0f64..2.0),
    )
        .prop_map(|(a, c, s)| {
            let ea = sorted3(a);
            // match traces so the operator satisfies the Bianchi identity
            let ec = sorted3([c[0], c[1], ea.iter().sum::<f64>() - c[0] - c[1]]);
            (ea, ec, sorted3(s))
        })
}

fn param_strategy() -> impl Strategy<Value = ConeParams> {
    (1.05f64..3.0, 0.05f64..1.0).prop_map(|(mu, frac)| ConeParams::new(frac * (mu - 1.0), mu).unwrap())
}

#[test]
fn parameter_validation() {
    assert!(ConeParams::new(1.0, 2.0).is_ok());
    assert!(ConeParams::new(0.0, 1.5).is_ok());
    for (eta, mu) in [(2.0, 2.0), (0.5, 1.0), (-0.1, 2.0), (f64::NAN, 2.0)] {
        let err = ConeParams::new(eta, mu).unwrap_err();
        assert!(matches!(err, Error::InvalidParams { .. }));
        assert!(err.to_string().contains("mu - 1 >= eta >= 0"));
    }
}

#[test]
fn identity_examples() {
    let p = ConeParams::new(1.0, 2.0).unwrap();
    let id = CurvatureOperator::identity();
    assert!(is_member(&id, &p, 0.0));
    assert_eq!(lower_bound_l(&id, &p, 1e-12).unwrap(), 0.0);
    let minus = id.scale(-1.0);
    assert!(!is_member(&minus, &p, 0.0));
    assert!((lower_bound_l(&minus, &p, 1e-12).unwrap() - 1.0).abs() < 1e-10);
    let rep = check_report(&minus, &p, None);
    assert!(!rep.member);
    assert!((rep.l.unwrap() - 1.0).abs() < 1e-10);
    let rep = check_report(&id, &p, None);
    assert!(rep.member && rep.wpic);
}

#[test]
fn eta_zero_needs_vanishing_mixed_block() {
    let p = ConeParams::new(0.0, 1.5).unwrap();
    let diag = planted(1, [-1.0, 0.5, 1.0], [0.0, 0.2, 0.3], [0.0; 3]);
    let l = lower_bound_l(&diag, &p, 1e-12).unwrap();
    assert!((l - oracle_l_eta0(&p, [-1.0, 0.5, 1.0], [0.0, 0.2, 0.3])).abs() < 1e-9);
    let mixed = planted(1, [-1.0, 0.5, 1.0], [0.0, 0.2, 0.3], [0.0, 0.1, 0.2]);
    assert!(matches!(lower_bound_l(&mixed, &p, 1e-12), Err(Error::Precondition(_))));
}

fn oracle_l_eta0(p: &ConeParams, ea: [f64; 3], ec: [f64; 3]) -> f64 {
    let (x, y) = (ea[0] + ea[1], ec[0] + ec[1]);
    let f2 = p.mu * x - (ea[1] + ea[2]);
    let f3 = p.mu * y - (ec[1] + ec[2]);
    [0.0, -f2 / (2.0 * (p.mu - 1.0)), -f3 / (2.0 * (p.mu - 1.0)), -x / 2.0, -y / 2.0]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn boundary_samples_pass_null_vector_check() {
    let p = ConeParams::new(0.5, 1.5).unwrap();
    for face in Face::ALL {
        for i in 0..50 {
            let mut s = Sampler::substream(SamplerConfig { seed: 5, ..Default::default() }, i);
            let b = s.boundary_member(&p, face).unwrap();
            assert!(is_member(&b.op, &p, 1e-10));
            let rep = null_vector_verify(&b.op, &p, face).unwrap();
            assert!(rep.slack >= -1e-8 * b.op.norm().powi(face.degree() + 1));
            assert!(rep.hamilton_slack >= -1e-10 * b.op.norm().powi(2));
        }
    }
}

#[test]
fn null_vector_rejects_interior_points() {
    let p = ConeParams::new(1.0, 2.0).unwrap();
    let err = null_vector_verify(&CurvatureOperator::identity(), &p, Face::F2).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn l_matches_closed_form((ea, ec, sv) in spectra(), p in param_strategy(), seed in 0u64..1000) {
        let r = planted(seed, ea, ec, sv);
        let tol = 1e-12 * r.norm().max(1.0);
        let l = lower_bound_l(&r, &p, tol).unwrap();
        let expected = oracle_l(&p, ea, ec, sv);
        prop_assert!((l - expected).abs() <= 1e-9 * r.norm().max(1.0), "l = {l}, oracle = {expected}");
    }

    #[test]
    fn closed_forms_match_spectra((ea, ec, sv) in spectra(), p in param_strategy(), seed in 0u64..1000) {
        let r = planted(seed, ea, ec, sv);
        let h = hat_f(&r, &p);
        let f1 = p.eta * (ea[0] + ea[1]) * (ec[0] + ec[1]) - (sv[1] + sv[2]).powi(2);
        prop_assert!((h[0] - f1).abs() <= 1e-10 * r.norm().powi(2).max(1.0));
        prop_assert!((h[1] - (p.mu * (ea[0] + ea[1]) - ea[1] - ea[2])).abs() <= 1e-10 * r.norm().max(1.0));
    }

    #[test]
    fn membership_monotone_under_shift((ea, ec, sv) in spectra(), p in param_strategy(), a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let r = planted(3, ea, ec, sv);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if shifted_membership(&r, lo, &p) {
            prop_assert!(shifted_membership(&r, hi + 1e-9, &p));
        }
    }

    #[test]
    fn membership_rotation_invariant(seed in 0u64..500) {
        let p = ConeParams::new(0.5, 1.5).unwrap();
        let mut s = Sampler::new(SamplerConfig { seed, ..Default::default() });
        let m = s.random_member(&p).unwrap();
        let q = s.random_rotation4();
        prop_assert!(is_member(&m.rotate(&q), &p, 0.0));
        let l0 = lower_bound_l(&m.scale(-1.0), &p, 1e-12).unwrap();
        let l1 = lower_bound_l(&m.scale(-1.0).rotate(&q), &p, 1e-12).unwrap();
        prop_assert!((l0 - l1).abs() <= 1e-9);
    }

    #[test]
    fn sampled_infimum_never_below_closed_form(seed in 0u64..200) {
        let p = ConeParams::new(1.0, 2.0).unwrap();
        let m = Sampler::new(SamplerConfig { seed, ..Default::default() }).random_member(&p).unwrap();
        let est = sampled_inf(&m, &p, 100, seed);
        let h = hat_f(&m, &p);
        for k in 0..3 {
            prop_assert!(est[k] >= h[k] - 1e-10 * m.norm().powi(2).max(1.0));
        }
    }
}
