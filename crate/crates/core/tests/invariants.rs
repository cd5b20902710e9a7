mod common;

use jumpfinder::bandwidth::{select_bandwidth, BandwidthSearchConfig};
use jumpfinder::{DetectorConfig, Method, ObservedSample};
use proptest::prelude::*;

fn sample_strategy() -> impl Strategy<Value = ObservedSample> {
    (20usize..120, any::<u64>()).prop_map(|(n, seed)| common::noisy_step(n, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shifted_is_conventional_one_bandwidth_over(sample in sample_strategy(), h in 0.05f64..0.4, k in 0usize..3) {
        prop_assume!(sample.domain().is_ok_and(|d| h < d.width() / 2.0));
        common::check_shift_identity(&sample, h, common::FAMILIES[k]).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn estimates_stay_within_response_range(sample in sample_strategy(), h in 0.05f64..0.4) {
        prop_assume!(sample.domain().is_ok_and(|d| h < d.width() / 2.0));
        common::check_range(&sample, h).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn reflection_mirrors_the_estimate(sample in sample_strategy(), h in 0.05f64..0.45) {
        let compared = common::check_mirror(&sample, h).map_err(TestCaseError::fail)?;
        prop_assume!(compared, "maximum is tied across grid points");
    }

    #[test]
    fn intervals_are_ordered_and_nested(
        locations in prop::collection::vec(-10.0f64..10.0, 1..400),
        a in 0.001f64..0.999,
        b in 0.001f64..0.999,
    ) {
        prop_assume!(a != b);
        common::check_ci(&locations, a.min(b), a.max(b)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn csv_roundtrip_is_identity(sample in sample_strategy()) {
        common::check_csv_roundtrip(&sample).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn kernels_are_normalized_monotone_and_mirrored() {
    common::check_kernels().unwrap();
}

#[test]
fn bootstrap_is_bit_reproducible() {
    let sample = common::noisy_step(80, 3);
    let domain = sample.domain().unwrap();
    let search = BandwidthSearchConfig::new(vec![0.1, 0.15, 0.2], 29, 11);
    let run = || {
        select_bandwidth(&sample, &search, &Method::new_default(), |h| DetectorConfig::new(h, domain)).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let bits = |r: &jumpfinder::BootstrapResult| r.replicate_locations.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));

    let other = BandwidthSearchConfig::new(vec![0.1, 0.15, 0.2], 29, 12);
    let c = select_bandwidth(&sample, &other, &Method::new_default(), |h| DetectorConfig::new(h, domain)).unwrap();
    assert_ne!(bits(&a), bits(&c));
}
