//! Low-pass FIR testbed: three band-limited signals plus white noise are
//! filtered, and the output is compared against the passband signal `d1`.
//!
//! The filter runs either in double precision or in Q1.(wl-1) fixed point
//! with every tap product routed through a [`MultiplierSpec`].

use std::f64::consts::PI;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed::FixedPointFormat;
use crate::multiplier::{MultiplierKind, MultiplierSpec};

const BUILTIN_COEFFICIENTS: &str = include_str!("../data/lowpass_31tap.txt");

/// Band edges are in units of π rad/sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub low: f64,
    pub high: f64,
}

impl Band {
    pub const fn new(low: f64, high: f64) -> Self {
        Self { low, high }
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestbedConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub signal_bandwidth: f64,
    pub guard_band: f64,
    pub noise_psd_db: f64,
    pub taps: usize,
    pub bands: [Band; 3],
    /// Length of the windowed-sinc filters that shape each `d_i`.
    pub synthesis_taps: usize,
    /// Fixed-point input scale is `input_headroom / max|x|`.
    pub input_headroom: f64,
    /// Delays within this many samples of the nominal group delay are tried
    /// when aligning the output with `d1`; the best one is reported.
    pub delay_search: usize,
}

impl Default for TestbedConfig {
    fn default() -> Self {
        Self {
            n_samples: 1 << 15,
            seed: 2014,
            signal_bandwidth: 0.25,
            guard_band: 0.1,
            noise_psd_db: -30.0,
            taps: 31,
            bands: [
                Band::new(0.0, 0.25),
                Band::new(0.35, 0.60),
                Band::new(0.70, 0.95),
            ],
            synthesis_taps: 255,
            input_headroom: 0.95,
            delay_search: 2,
        }
    }
}

impl TestbedConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("testbed config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_samples < 4096 {
            return fail(format!("n_samples = {} is below 4096", self.n_samples));
        }
        if self.taps == 0 {
            return fail("taps must be positive".into());
        }
        if self.synthesis_taps.is_multiple_of(2) {
            return fail("synthesis_taps must be odd".into());
        }
        if !(self.input_headroom > 0.0 && self.input_headroom <= 1.0) {
            return fail("input_headroom must lie in (0, 1]".into());
        }
        const EPS: f64 = 1e-9;
        if self.bands[0].low != 0.0 {
            return fail("d1 band must start at 0".into());
        }
        for (i, band) in self.bands.iter().enumerate() {
            if !(band.low >= 0.0 && band.high <= 1.0 && band.low < band.high) {
                return fail(format!("band d{} must satisfy 0 <= low < high <= 1", i + 1));
            }
            if (band.width() - self.signal_bandwidth).abs() > EPS {
                return fail(format!(
                    "band d{} is {} wide, expected {}",
                    i + 1,
                    band.width(),
                    self.signal_bandwidth
                ));
            }
        }
        for (i, pair) in self.bands.windows(2).enumerate() {
            if pair[1].low - pair[0].high < self.guard_band - EPS {
                return fail(format!(
                    "bands d{} and d{} overlap or violate the {} guard band",
                    i + 1,
                    i + 2,
                    self.guard_band
                ));
            }
        }
        Ok(())
    }

    pub fn noise_variance(&self) -> f64 {
        10f64.powf(self.noise_psd_db / 10.0)
    }

    /// Integer group delay of a linear-phase filter with `taps` taps.
    pub fn group_delay(&self) -> usize {
        self.taps / 2
    }
}

/// Design parameters recorded in a coefficient file header.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub passband_edge: Option<f64>,
    pub stopband_edge: Option<f64>,
    pub min_stopband_attenuation_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoefficients {
    pub taps: Vec<f64>,
    pub provenance: String,
    pub design: DesignRecord,
}

impl FilterCoefficients {
    /// The shipped 31-tap equiripple low-pass design.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_COEFFICIENTS).expect("shipped coefficient file is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Coefficients(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses `# key: value` header lines followed by one coefficient per
    /// line. A `taps` header, when present, must match the coefficient count.
    pub fn parse(text: &str) -> Result<Self> {
        let mut taps = Vec::new();
        let mut header = Vec::new();
        let mut declared_taps = None;
        let mut design = DesignRecord::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                header.push(comment.to_string());
                let Some((key, value)) = comment.split_once(':') else {
                    continue;
                };
                let leading = || {
                    value
                        .split_whitespace()
                        .next()
                        .and_then(|v| v.parse::<f64>().ok())
                };
                match key.trim() {
                    "taps" => declared_taps = leading().map(|v| v as usize),
                    "passband_edge" => design.passband_edge = leading(),
                    "stopband_edge" => design.stopband_edge = leading(),
                    "min_stopband_attenuation_db" => design.min_stopband_attenuation_db = leading(),
                    _ => {}
                }
                continue;
            }
            let value: f64 = line.parse().map_err(|_| {
                Error::Coefficients(format!("line {}: `{line}` is not a number", lineno + 1))
            })?;
            taps.push(value);
        }
        if taps.is_empty() {
            return Err(Error::Coefficients("no coefficients found".into()));
        }
        if let Some(declared) = declared_taps {
            if declared != taps.len() {
                return Err(Error::Coefficients(format!(
                    "header declares {declared} taps, file has {}",
                    taps.len()
                )));
            }
        }
        Ok(Self {
            taps,
            provenance: header.join("\n"),
            design,
        })
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// |H(e^{jω})| with `omega` in units of π.
    pub fn magnitude(&self, omega: f64) -> f64 {
        let w = omega * PI;
        let (re, im) = self
            .taps
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (k, h)| {
                (re + h * (w * k as f64).cos(), im - h * (w * k as f64).sin())
            });
        re.hypot(im)
    }

    pub fn dc_gain_db(&self) -> f64 {
        20.0 * self.taps.iter().sum::<f64>().abs().log10()
    }

    /// Largest gain over `band`, on a dense grid.
    pub fn max_gain_db(&self, band: Band) -> f64 {
        const POINTS: usize = 2048;
        (0..=POINTS)
            .map(|i| band.low + band.width() * i as f64 / POINTS as f64)
            .map(|w| 20.0 * self.magnitude(w).log10())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Blackman-windowed sinc band-pass (low-pass when `band.low == 0`).
pub fn bandpass_kernel(band: Band, taps: usize) -> Vec<f64> {
    let sinc = |t: f64| {
        if t == 0.0 {
            1.0
        } else {
            (PI * t).sin() / (PI * t)
        }
    };
    let center = (taps - 1) as f64 / 2.0;
    let span = (taps - 1) as f64;
    (0..taps)
        .map(|n| {
            let t = n as f64 - center;
            let ideal = band.high * sinc(band.high * t) - band.low * sinc(band.low * t);
            let phase = 2.0 * PI * n as f64 / span;
            let window = 0.42 - 0.5 * phase.cos() + 0.08 * (2.0 * phase).cos();
            ideal * window
        })
        .collect()
}

pub fn power(signal: &[f64]) -> f64 {
    signal.iter().map(|v| v * v).sum::<f64>() / signal.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signals {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
    pub eta: Vec<f64>,
    pub x: Vec<f64>,
}

/// Synthesizes the testbed input. Each `d_i` is white Gaussian noise shaped
/// by a windowed-sinc band-pass and scaled to unit average power; `eta` is
/// white Gaussian noise with the configured variance.
pub fn generate_signals(config: &TestbedConfig) -> Result<Signals> {
    config.validate()?;
    let n = config.n_samples;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut band_signal = |band: Band| {
        let kernel = bandpass_kernel(band, config.synthesis_taps);
        let white: Vec<f64> = (0..n + kernel.len() - 1)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let shaped: Vec<f64> = white
            .windows(kernel.len())
            .map(|w| w.iter().rev().zip(&kernel).map(|(a, b)| a * b).sum())
            .collect();
        let gain = power(&shaped).sqrt().recip();
        shaped.into_iter().map(|v| v * gain).collect::<Vec<f64>>()
    };
    let d1 = band_signal(config.bands[0]);
    let d2 = band_signal(config.bands[1]);
    let d3 = band_signal(config.bands[2]);
    let noise = Normal::new(0.0, config.noise_variance().sqrt())
        .map_err(|e| Error::Config(format!("noise level: {e}")))?;
    let eta: Vec<f64> = (0..n).map(|_| noise.sample(&mut rng)).collect();
    let x = (0..n).map(|i| d1[i] + d2[i] + d3[i] + eta[i]).collect();
    Ok(Signals { d1, d2, d3, eta, x })
}

/// Direct-form convolution with zero initial state; output has the input's
/// length.
pub fn fir_filter_real(x: &[f64], coeffs: &FilterCoefficients) -> Vec<f64> {
    (0..x.len())
        .map(|n| {
            coeffs
                .taps
                .iter()
                .take(n + 1)
                .enumerate()
                .map(|(k, h)| h * x[n - k])
                .sum()
        })
        .collect()
}

/// Fixed-point filter. Samples and coefficients are quantized to
/// Q1.(wl-1); each tap product is `multiplier(sample, coefficient)` with the
/// coefficient as the Booth-recoded operand, accumulated exactly and scaled
/// back by `2^-2(wl-1)`.
pub fn fir_filter_fixed(
    x: &[f64],
    coeffs: &FilterCoefficients,
    multiplier: &MultiplierSpec,
) -> Result<Vec<f64>> {
    multiplier.validate()?;
    if !multiplier.kind.is_signed() {
        return Err(Error::Config(format!(
            "the FIR filter needs a signed multiplier, got {}",
            multiplier.kind
        )));
    }
    let format = FixedPointFormat::new(multiplier.wl)?;
    let samples = format.encode_all(x)?;
    let taps = format.encode_all(&coeffs.taps).map_err(|e| match e {
        Error::FixedPointOverflow { index, value, .. } => Error::Coefficients(format!(
            "coefficient {index} = {value} does not fit Q1.{}",
            format.frac_bits()
        )),
        other => other,
    })?;
    let out_scale = (-2.0 * format.frac_bits() as f64).exp2();
    Ok((0..samples.len())
        .map(|n| {
            let acc: i64 = taps
                .iter()
                .take(n + 1)
                .enumerate()
                .map(|(k, &h)| multiplier.multiply_unchecked(samples[n - k], h))
                .sum();
            acc as f64 * out_scale
        })
        .collect())
}

/// `10·log10(P(reference) / P(reference - other))`; `+inf` when the two are
/// identical.
pub fn compute_snr(reference: &[f64], other: &[f64]) -> f64 {
    assert_eq!(
        reference.len(),
        other.len(),
        "SNR needs equal-length sequences"
    );
    let signal: f64 = reference.iter().map(|v| v * v).sum();
    let noise: f64 = reference
        .iter()
        .zip(other)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if noise == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (signal / noise).log10()
    }
}

/// SNR of a filter output against `reference` delayed by `delay`, skipping
/// the first `warmup` output samples.
pub fn delayed_snr(reference: &[f64], output: &[f64], delay: usize, warmup: usize) -> f64 {
    let n = reference.len().min(output.len());
    let start = warmup.saturating_sub(delay);
    if delay >= n || start >= n - delay {
        return f64::NAN;
    }
    compute_snr(&reference[start..n - delay], &output[start + delay..n])
}

/// Best [`delayed_snr`] over `nominal ± radius`, with the delay that won.
pub fn aligned_snr(
    reference: &[f64],
    output: &[f64],
    nominal: usize,
    radius: usize,
    warmup: usize,
) -> (f64, usize) {
    (nominal.saturating_sub(radius)..=nominal + radius)
        .map(|d| (delayed_snr(reference, output, d, warmup), d))
        .filter(|(snr, _)| !snr.is_nan())
        .fold((f64::NEG_INFINITY, nominal), |best, cur| {
            if cur.0 > best.0 {
                cur
            } else {
                best
            }
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub snr_in_db: f64,
    pub snr_out_db: f64,
}

/// One point of a WL or VBL sweep; `kind` is `None` for the double
/// precision reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub kind: Option<MultiplierKind>,
    pub wl: u32,
    pub vbl: u32,
    pub snr_in_db: f64,
    pub snr_out_db: f64,
}

/// Signals, coefficients and input scaling shared by every run of one
/// configuration.
#[derive(Debug, Clone)]
pub struct Testbed {
    pub config: TestbedConfig,
    pub coeffs: FilterCoefficients,
    pub signals: Signals,
    /// Scale applied to `x` before quantization.
    pub input_scale: f64,
}

impl Testbed {
    pub fn new(config: TestbedConfig, coeffs: FilterCoefficients) -> Result<Self> {
        config.validate()?;
        if coeffs.len() != config.taps {
            return Err(Error::Config(format!(
                "config expects {} taps, coefficients have {}",
                config.taps,
                coeffs.len()
            )));
        }
        let signals = generate_signals(&config)?;
        let peak = signals.x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let input_scale = config.input_headroom / peak;
        Ok(Self {
            config,
            coeffs,
            signals,
            input_scale,
        })
    }

    pub fn with_defaults() -> Result<Self> {
        Self::new(TestbedConfig::default(), FilterCoefficients::builtin())
    }

    pub fn snr_in(&self) -> f64 {
        compute_snr(&self.signals.d1, &self.signals.x)
    }

    fn snr_out(&self, y: &[f64]) -> f64 {
        aligned_snr(
            &self.signals.d1,
            y,
            self.config.group_delay(),
            self.config.delay_search,
            self.coeffs.len() - 1,
        )
        .0
    }

    pub fn run_real(&self) -> SnrReport {
        let y = fir_filter_real(&self.signals.x, &self.coeffs);
        SnrReport {
            snr_in_db: self.snr_in(),
            snr_out_db: self.snr_out(&y),
        }
    }

    /// Runs the fixed-point filter on the scaled input and undoes the scale
    /// on the output, so SNR is measured against the unscaled `d1`.
    pub fn filter_fixed(&self, multiplier: &MultiplierSpec) -> Result<Vec<f64>> {
        let scaled: Vec<f64> = self
            .signals
            .x
            .iter()
            .map(|v| v * self.input_scale)
            .collect();
        let y = fir_filter_fixed(&scaled, &self.coeffs, multiplier)?;
        Ok(y.into_iter().map(|v| v / self.input_scale).collect())
    }

    pub fn run_fixed(&self, multiplier: &MultiplierSpec) -> Result<SnrReport> {
        let y = self.filter_fixed(multiplier)?;
        Ok(SnrReport {
            snr_in_db: self.snr_in(),
            snr_out_db: self.snr_out(&y),
        })
    }

    fn point(&self, multiplier: &MultiplierSpec) -> Result<SnrPoint> {
        let report = self.run_fixed(multiplier)?;
        Ok(SnrPoint {
            kind: Some(multiplier.kind),
            wl: multiplier.wl,
            vbl: multiplier.vbl,
            snr_in_db: report.snr_in_db,
            snr_out_db: report.snr_out_db,
        })
    }

    /// Accurate Booth multiplier at each word length.
    pub fn snr_sweep_wl(&self, wls: &[u32]) -> Result<Vec<SnrPoint>> {
        wls.par_iter()
            .map(|&wl| self.point(&MultiplierSpec::accurate(wl)?))
            .collect()
    }

    /// Type0 broken-Booth multiplier at fixed `wl` for each VBL.
    pub fn snr_sweep_vbl(&self, wl: u32, vbls: &[u32]) -> Result<Vec<SnrPoint>> {
        vbls.par_iter()
            .map(|&vbl| self.point(&MultiplierSpec::broken_t0(wl, vbl)?))
            .collect()
    }
}

pub const QUAP_TABLE_SCALE: f64 = 1e4;

/// Quality (SNR_out squared) times area saving times power saving, both
/// savings in percent.
pub fn quap(snr_out_db: f64, area_saving_pct: f64, power_saving_pct: f64) -> f64 {
    snr_out_db * snr_out_db * area_saving_pct * power_saving_pct
}

/// Relative saving in percent, e.g. from a baseline area to a reduced one.
pub fn saving_pct(baseline: f64, reduced: f64) -> f64 {
    100.0 * (baseline - reduced) / baseline
}
