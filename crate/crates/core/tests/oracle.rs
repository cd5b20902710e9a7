mod common;

use common::brute;
use jumpfinder::estimators::{robust_onesided, Side};
use jumpfinder::{Error, KernelFamily, ObservedSample};

#[test]
fn estimators_match_brute_force_on_random_instances() {
    let checks = common::oracle_equivalence(200, 0x5eed_0a11, 1e-12).unwrap();
    assert_eq!(checks, 200 * (5 * 2 * 3 + 2));
}

/// Three observations in the right window give non-trivial discrepancy
/// weights. The single left observation attains the largest discrepancy, so
/// its weight vanishes and the left estimate is undefined.
#[test]
fn six_point_step_matches_frozen_brute_force_value() {
    let w = vec![0.24, 0.41, 0.53, 0.59, 0.66, 0.81];
    let y = vec![0.1, -0.05, 1.1, 0.9, 1.05, 1.2];
    let sample = ObservedSample::new(w.clone(), y.clone()).unwrap();
    let epa = KernelFamily::Epanechnikov;

    let oracle = brute::robust(&w, &y, 0.5, 0.2, true, epa, epa).unwrap();
    assert!((oracle - FROZEN_RIGHT).abs() < 1e-15, "oracle {oracle:.17e}");
    let got = robust_onesided(&sample, 0.5, 0.2, Side::Right, epa, epa).unwrap();
    assert!((got - FROZEN_RIGHT).abs() < 1e-12, "{got:.17e}");

    assert_eq!(brute::robust(&w, &y, 0.5, 0.2, false, epa, epa), None);
    assert_eq!(robust_onesided(&sample, 0.5, 0.2, Side::Left, epa, epa), Err(Error::EmptyWindow));
}

const FROZEN_RIGHT: f64 = 1.077_382_189_742_408_3;
