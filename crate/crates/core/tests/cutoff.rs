use curvcone::cutoff::{build_cutoff, theorem_variant_check, verify_cutoff, CutoffSpec};
use serde_json::Value;

fn spec(eps: f64, sigma: f64, r: f64) -> CutoffSpec {
    CutoffSpec {
        eps,
        sigma,
        r,
        grid_n: 10_000,
    }
}

#[test]
fn flat_regions_are_exact() {
    let c = build_cutoff(spec(0.5, 1.0, 2.0)).unwrap();
    assert_eq!(c.eval(1.0), (1.0, 0.0, 0.0));
    assert_eq!(c.eval(2.0), (1.0, 0.0, 0.0));
    assert_eq!(c.eval(3.0), (0.0, 0.0, 0.0));
    assert_eq!(c.eval(5.0), (0.0, 0.0, 0.0));
    let (phi, _, _) = c.eval(2.5);
    assert!(phi > 0.0 && phi < 1.0);
}

#[test]
fn all_combinations_certify() {
    for eps in [0.1, 0.5, 1.0] {
        for sigma in [0.5, 1.0, 2.0] {
            let rep = verify_cutoff(&build_cutoff(spec(eps, sigma, 0.0)).unwrap());
            assert!(rep.passed(), "eps {eps} sigma {sigma}: {:?}", rep.violations.first());
            assert!(rep.worst_ratio_first <= 1.0 && rep.worst_ratio_second <= 1.0);
        }
    }
}

#[test]
fn invalid_specs_rejected() {
    assert!(build_cutoff(spec(0.0, 1.0, 0.0)).is_err());
    assert!(build_cutoff(spec(1.5, 1.0, 0.0)).is_err());
    assert!(build_cutoff(spec(0.5, -1.0, 0.0)).is_err());
}

#[test]
fn theorem_constant_matches_golden() {
    let golden: Value = serde_json::from_str(include_str!("golden/cutoff_c0.json")).unwrap();
    let s = spec(
        golden["eps"].as_f64().unwrap(),
        golden["sigma"].as_f64().unwrap(),
        golden["r"].as_f64().unwrap(),
    );
    let c0 = theorem_variant_check(&build_cutoff(s).unwrap()).c0;
    let expected = golden["c0"].as_f64().unwrap();
    assert!((c0 - expected).abs() <= 1e-12 * expected, "c0 = {c0}");
    // the constant is translation invariant
    let shifted = theorem_variant_check(&build_cutoff(CutoffSpec { r: 3.0, ..s }).unwrap()).c0;
    assert!((shifted - expected).abs() <= 1e-9 * expected);
}
