use bbm_core::fir::{
    compute_snr, fir_filter_fixed, fir_filter_real, generate_signals, power, FilterCoefficients,
    Testbed, TestbedConfig,
};
use bbm_core::MultiplierSpec;
use rustfft::{num_complex::Complex, FftPlanner};

const SEGMENT: usize = 1024;

/// Welch periodogram (Hann window, 50% overlap) over `[0, π]`.
fn welch(signal: &[f64]) -> Vec<f64> {
    let fft = FftPlanner::new().plan_fft_forward(SEGMENT);
    let window: Vec<f64> = (0..SEGMENT)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / SEGMENT as f64).cos())
        .collect();
    let mut psd = vec![0.0; SEGMENT / 2 + 1];
    let mut segments = 0;
    for start in (0..=signal.len() - SEGMENT).step_by(SEGMENT / 2) {
        let mut buf: Vec<Complex<f64>> = signal[start..start + SEGMENT]
            .iter()
            .zip(&window)
            .map(|(s, w)| Complex::new(s * w, 0.0))
            .collect();
        fft.process(&mut buf);
        for (p, c) in psd.iter_mut().zip(&buf) {
            *p += c.norm_sqr();
        }
        segments += 1;
    }
    psd.iter().map(|p| p / segments as f64).collect()
}

fn bin_frequency(k: usize) -> f64 {
    2.0 * k as f64 / SEGMENT as f64
}

#[test]
fn signals_stay_in_their_bands() {
    let config = TestbedConfig::default();
    let signals = generate_signals(&config).unwrap();
    let margin = config.guard_band / 2.0;
    for (signal, band) in [&signals.d1, &signals.d2, &signals.d3]
        .into_iter()
        .zip(config.bands)
    {
        let psd = welch(signal);
        let inside: Vec<f64> = (0..psd.len())
            .filter(|&k| {
                let f = bin_frequency(k);
                f >= band.low + margin && f <= band.high - margin
            })
            .map(|k| psd[k])
            .collect();
        let in_band = inside.iter().sum::<f64>() / inside.len() as f64;
        let leakage = (0..psd.len())
            .filter(|&k| {
                let f = bin_frequency(k);
                f < band.low - margin || f > band.high + margin
            })
            .map(|k| psd[k])
            .fold(0.0, f64::max);
        let relative_db = 10.0 * (leakage / in_band).log10();
        assert!(
            relative_db <= -40.0,
            "band {band:?}: leakage {relative_db:.1} dB"
        );
    }
}

#[test]
fn passband_signal_passes_nearly_unchanged() {
    let config = TestbedConfig::default();
    let coeffs = FilterCoefficients::builtin();
    let signals = generate_signals(&config).unwrap();
    let y = fir_filter_real(&signals.d1, &coeffs);
    let delay = config.group_delay();
    let n = y.len();
    let snr = compute_snr(&signals.d1[30..n - delay], &y[30 + delay..]);
    assert!(snr >= 30.0, "{snr}");
}

#[test]
fn snr_is_scale_invariant_for_real_filter() {
    let config = TestbedConfig {
        n_samples: 8192,
        ..TestbedConfig::default()
    };
    let coeffs = FilterCoefficients::builtin();
    let s = generate_signals(&config).unwrap();
    let y = fir_filter_real(&s.x, &coeffs);
    let scaled_x: Vec<f64> = s.x.iter().map(|v| v * 0.3).collect();
    let scaled_d1: Vec<f64> = s.d1.iter().map(|v| v * 0.3).collect();
    let y_scaled = fir_filter_real(&scaled_x, &coeffs);
    let a = compute_snr(&s.d1[..8000], &y[15..8015]);
    let b = compute_snr(&scaled_d1[..8000], &y_scaled[15..8015]);
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn zero_vbl_is_bit_identical_to_accurate() {
    let testbed = Testbed::new(
        TestbedConfig {
            n_samples: 8192,
            ..TestbedConfig::default()
        },
        FilterCoefficients::builtin(),
    )
    .unwrap();
    for wl in [8, 12, 16] {
        let accurate = testbed
            .filter_fixed(&MultiplierSpec::accurate(wl).unwrap())
            .unwrap();
        let t0 = testbed
            .filter_fixed(&MultiplierSpec::broken_t0(wl, 0).unwrap())
            .unwrap();
        let t1 = testbed
            .filter_fixed(&MultiplierSpec::broken_t1(wl, 0).unwrap())
            .unwrap();
        assert_eq!(accurate, t0);
        assert_eq!(accurate, t1);
    }
}

#[test]
fn runs_are_deterministic() {
    let config = TestbedConfig {
        n_samples: 8192,
        ..TestbedConfig::default()
    };
    let a = Testbed::new(config.clone(), FilterCoefficients::builtin()).unwrap();
    let b = Testbed::new(config, FilterCoefficients::builtin()).unwrap();
    assert_eq!(a.signals, b.signals);
    let spec = MultiplierSpec::broken_t0(16, 13).unwrap();
    assert_eq!(a.run_fixed(&spec).unwrap(), b.run_fixed(&spec).unwrap());
    assert_eq!(a.run_real(), b.run_real());
}

#[test]
fn accurate_fixed_point_converges_to_double() {
    let testbed = Testbed::with_defaults().unwrap();
    let real = testbed.run_real().snr_out_db;
    let wl16 = testbed
        .run_fixed(&MultiplierSpec::accurate(16).unwrap())
        .unwrap()
        .snr_out_db;
    assert!((real - wl16).abs() < 0.05, "real {real} wl16 {wl16}");
    let points = testbed.snr_sweep_wl(&[8, 10, 12, 14, 16]).unwrap();
    for pair in points.windows(2) {
        assert!(pair[1].snr_out_db >= pair[0].snr_out_db - 0.3, "{pair:?}");
    }
}

#[test]
fn vbl_sweep_starts_at_accurate_value() {
    let testbed = Testbed::with_defaults().unwrap();
    let points = testbed.snr_sweep_vbl(16, &[0, 8, 12, 16, 20]).unwrap();
    let accurate = testbed
        .run_fixed(&MultiplierSpec::accurate(16).unwrap())
        .unwrap();
    assert_eq!(points[0].snr_out_db, accurate.snr_out_db);
    for pair in points.windows(2) {
        assert!(pair[1].snr_out_db <= pair[0].snr_out_db + 0.3, "{pair:?}");
    }
    assert!(points[4].snr_out_db < points[0].snr_out_db - 10.0);
}

#[test]
fn fixed_filter_demands_prescaled_input() {
    let s = generate_signals(&TestbedConfig {
        n_samples: 4096,
        ..TestbedConfig::default()
    })
    .unwrap();
    assert!(power(&s.x) > 1.0);
    let err = fir_filter_fixed(
        &s.x,
        &FilterCoefficients::builtin(),
        &MultiplierSpec::accurate(16).unwrap(),
    );
    assert!(err.is_err());
}

#[test]
fn mismatched_tap_count_is_rejected() {
    let config = TestbedConfig {
        taps: 30,
        ..TestbedConfig::default()
    };
    assert!(Testbed::new(config, FilterCoefficients::builtin()).is_err());
}
