mod common;

use bbm_core::stats::{
    accumulate_exhaustive, accumulate_range, error_histogram, mse_vs_parameter_sweep,
    sweep_exhaustive, sweep_sampled, ErrorAccumulator, SweepMode, SweepOptions,
    DEFAULT_HISTOGRAM_BINS,
};
use bbm_core::{MultiplierKind, MultiplierSpec};
use common::signed_range;
use proptest::prelude::*;

fn t0(wl: u32, vbl: u32) -> MultiplierSpec {
    MultiplierSpec::broken_t0(wl, vbl).unwrap()
}

#[test]
fn worker_count_does_not_change_results() {
    let spec = t0(8, 5);
    let single = accumulate_exhaustive(&spec, &SweepOptions::with_threads(1)).unwrap();
    let many = accumulate_exhaustive(&spec, &SweepOptions::with_threads(4)).unwrap();
    assert_eq!(single, many);
    assert_eq!(single, accumulate_range(&spec, -128..=127).unwrap());
}

#[test]
fn enumeration_order_does_not_matter() {
    let spec = t0(6, 4);
    let mut forward = ErrorAccumulator::new();
    let mut backward = ErrorAccumulator::new();
    for x in signed_range(6) {
        for y in signed_range(6) {
            forward.push(spec.multiply(x, y).unwrap() - x * y);
        }
    }
    for y in signed_range(6).rev() {
        for x in signed_range(6).rev() {
            backward.push(spec.multiply(x, y).unwrap() - x * y);
        }
    }
    assert_eq!(forward, backward);
    assert_eq!(
        forward,
        accumulate_exhaustive(&spec, &SweepOptions::default()).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn any_partition_merges_to_single_pass(mut cuts in prop::collection::vec(-128i64..128, 0..6), vbl in 0u32..=8) {
        let spec = t0(8, vbl);
        cuts.sort_unstable();
        cuts.dedup();
        let mut bounds = vec![-128i64];
        bounds.extend(cuts.into_iter().filter(|&c| c > -128));
        bounds.push(128);
        let merged = bounds
            .windows(2)
            .map(|w| accumulate_range(&spec, w[0]..=w[1] - 1).unwrap())
            .fold(ErrorAccumulator::new(), ErrorAccumulator::merge);
        prop_assert_eq!(merged, accumulate_range(&spec, -128..=127).unwrap());
    }
}

#[test]
fn report_invariants_hold() {
    for spec in [
        t0(8, 6),
        MultiplierSpec::broken_t1(8, 9).unwrap(),
        MultiplierSpec::bam(8, 6, 0).unwrap(),
        MultiplierSpec::block(8, 9).unwrap(),
    ] {
        let r = sweep_exhaustive(&spec).unwrap();
        assert!((0.0..=1.0).contains(&r.error_probability));
        assert!(r.min_error as f64 <= r.mean && r.mean <= r.max_error as f64);
        assert!(r.mse >= r.mean * r.mean - 1e-9);
    }
}

#[test]
fn sampled_mse_agrees_with_exhaustive() {
    let spec = t0(12, 6);
    let exhaustive = sweep_exhaustive(&spec).unwrap();
    // fourth moment of the error for the standard error of a sampled MSE
    let mut fourth = 0f64;
    for x in signed_range(12) {
        for y in signed_range(12) {
            let e = (spec.multiply_unchecked(x, y) - x * y) as f64;
            fourth += e.powi(4);
        }
    }
    fourth /= (1u64 << 24) as f64;
    let n = 1_000_000u64;
    let sigma = ((fourth - exhaustive.mse.powi(2)) / n as f64).sqrt();
    let sampled = sweep_sampled(&spec, n, 0x5eed).unwrap();
    assert!(
        (sampled.mse - exhaustive.mse).abs() <= 3.0 * sigma,
        "sampled {} exhaustive {} sigma {sigma}",
        sampled.mse,
        exhaustive.mse
    );
    assert!((exhaustive.mse - 5.05e3).abs() / 5.05e3 < 0.01);
    assert_eq!(sampled, sweep_sampled(&spec, n, 0x5eed).unwrap());
}

#[test]
fn histogram_of_wl10_vbl9() {
    let spec = t0(10, 9);
    let h = error_histogram(
        &spec,
        DEFAULT_HISTOGRAM_BINS,
        SweepMode::Exhaustive,
        &SweepOptions::default(),
    )
    .unwrap();
    assert_eq!(h.total(), 1 << 20);
    assert_eq!(h.normalization, (1u64 << 19) as f64);
    // bins entirely above zero stay empty
    for (i, &count) in h.counts.iter().enumerate() {
        if h.bin_edges[i] > 0.0 {
            assert_eq!(count, 0, "bin {i}");
        }
    }
    let r = sweep_exhaustive(&spec).unwrap();
    assert!(r.max_error <= 0);
    let pct: f64 = h.percentages().iter().sum();
    assert!((pct - 100.0).abs() < 1e-9);
}

#[test]
fn sampled_histogram_conserves_counts() {
    let spec = t0(16, 15);
    let h = error_histogram(
        &spec,
        11,
        SweepMode::Sampled {
            samples: 5000,
            seed: 9,
        },
        &SweepOptions::default(),
    )
    .unwrap();
    assert_eq!(h.total(), 5000);
}

#[test]
fn bam_sweep_is_monotone() {
    let params: Vec<u32> = (0..=8).collect();
    let rows = mse_vs_parameter_sweep(
        MultiplierKind::Bam,
        8,
        &params,
        SweepMode::Exhaustive,
        &SweepOptions::default(),
    )
    .unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0].report.mse, 0.0);
    for pair in rows.windows(2) {
        assert!(pair[1].report.mse >= pair[0].report.mse);
    }
}

#[test]
fn sweeps_at_wl16_need_sampling() {
    let spec = t0(16, 13);
    assert!(sweep_exhaustive(&spec).is_err());
    let sampled = sweep_sampled(&spec, 20_000, 1).unwrap();
    assert!(sampled.mean < 0.0);
}
