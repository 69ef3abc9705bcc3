//! Error characterization of multiplier specs.
//!
//! The error of one input vector is `approximate - exact`. Raw sums are kept
//! in 128-bit integers so that results are exact and independent of how the
//! operand space is partitioned across workers; floating point only appears
//! when an [`ErrorReport`] is produced.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiplier::{MultiplierKind, MultiplierSpec};

/// Largest exhaustive sweep allowed by default: all pairs of 12-bit operands.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

pub const DEFAULT_HISTOGRAM_BINS: usize = 101;

/// Streaming, mergeable error statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorAccumulator {
    pub count: u64,
    pub sum_error: i128,
    pub sum_sq_error: u128,
    pub nonzero_count: u64,
    /// `i64::MAX` while empty.
    pub min_error: i64,
    /// `i64::MIN` while empty.
    pub max_error: i64,
}

impl Default for ErrorAccumulator {
    fn default() -> Self {
        Self {
            count: 0,
            sum_error: 0,
            sum_sq_error: 0,
            nonzero_count: 0,
            min_error: i64::MAX,
            max_error: i64::MIN,
        }
    }
}

impl ErrorAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, error: i64) {
        self.count += 1;
        self.sum_error += error as i128;
        self.sum_sq_error += (error as i128 * error as i128) as u128;
        self.nonzero_count += (error != 0) as u64;
        self.min_error = self.min_error.min(error);
        self.max_error = self.max_error.max(error);
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            count: self.count + other.count,
            sum_error: self.sum_error + other.sum_error,
            sum_sq_error: self.sum_sq_error + other.sum_sq_error,
            nonzero_count: self.nonzero_count + other.nonzero_count,
            min_error: self.min_error.min(other.min_error),
            max_error: self.max_error.max(other.max_error),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn report(&self) -> ErrorReport {
        if self.is_empty() {
            return ErrorReport {
                n: 0,
                mean: 0.0,
                mse: 0.0,
                error_probability: 0.0,
                min_error: 0,
                max_error: 0,
            };
        }
        let n = self.count as f64;
        ErrorReport {
            n: self.count,
            mean: self.sum_error as f64 / n,
            mse: self.sum_sq_error as f64 / n,
            error_probability: self.nonzero_count as f64 / n,
            min_error: self.min_error,
            max_error: self.max_error,
        }
    }
}

impl Extend<i64> for ErrorAccumulator {
    fn extend<T: IntoIterator<Item = i64>>(&mut self, iter: T) {
        for error in iter {
            self.push(error);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub n: u64,
    pub mean: f64,
    pub mse: f64,
    pub error_probability: f64,
    pub min_error: i64,
    pub max_error: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Worker count; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Maximum number of input vectors an exhaustive sweep may apply.
    pub budget: u128,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            threads: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl SweepOptions {
    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads: Some(threads),
            ..Self::default()
        }
    }

    fn install<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(job()),
            Some(threads) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads.max(1))
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SweepMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[inline]
fn error_of(spec: &MultiplierSpec, x: i64, y: i64) -> i64 {
    spec.multiply_unchecked(x, y) - x * y
}

/// Accumulates the error over `xs × (full operand range)`.
pub fn accumulate_range(
    spec: &MultiplierSpec,
    xs: RangeInclusive<i64>,
) -> Result<ErrorAccumulator> {
    spec.validate()?;
    let full = spec.operand_range();
    if xs.start() < full.start() || xs.end() > full.end() {
        return Err(Error::Config(format!(
            "x range {xs:?} outside operand range {full:?}"
        )));
    }
    let mut acc = ErrorAccumulator::new();
    for x in xs {
        for y in full.clone() {
            acc.push(error_of(spec, x, y));
        }
    }
    Ok(acc)
}

/// Splits the x operand range into contiguous blocks sharing their high bits.
fn x_partitions(spec: &MultiplierSpec) -> Vec<RangeInclusive<i64>> {
    let range = spec.operand_range();
    let span = 1i64 << spec.wl;
    let block = (span >> 6).max(1);
    (0..span / block)
        .map(|b| {
            let start = range.start() + b * block;
            start..=start + block - 1
        })
        .collect()
}

fn check_budget(spec: &MultiplierSpec, options: &SweepOptions) -> Result<()> {
    let required = spec.input_vectors();
    if required > options.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: options.budget,
        });
    }
    Ok(())
}

fn exhaustive_fold<T, V, M>(
    spec: &MultiplierSpec,
    options: &SweepOptions,
    init: impl Fn() -> T + Sync + Send,
    visit: V,
    merge: M,
) -> Result<T>
where
    T: Send,
    V: Fn(&mut T, i64) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    spec.validate()?;
    check_budget(spec, options)?;
    let partitions = x_partitions(spec);
    let ys = spec.operand_range();
    options.install(|| {
        partitions
            .into_par_iter()
            .map(|xs| {
                let mut state = init();
                for x in xs {
                    for y in ys.clone() {
                        visit(&mut state, error_of(spec, x, y));
                    }
                }
                state
            })
            .reduce(&init, &merge)
    })
}

pub fn accumulate_exhaustive(
    spec: &MultiplierSpec,
    options: &SweepOptions,
) -> Result<ErrorAccumulator> {
    exhaustive_fold(
        spec,
        options,
        ErrorAccumulator::new,
        |acc, error| acc.push(error),
        ErrorAccumulator::merge,
    )
}

/// Applies every operand pair of `spec`.
pub fn sweep_exhaustive(spec: &MultiplierSpec) -> Result<ErrorReport> {
    sweep_exhaustive_with(spec, &SweepOptions::default())
}

pub fn sweep_exhaustive_with(spec: &MultiplierSpec, options: &SweepOptions) -> Result<ErrorReport> {
    Ok(accumulate_exhaustive(spec, options)?.report())
}

/// Operand pairs drawn uniformly and independently from a ChaCha8 stream.
fn sampled_pairs(
    spec: &MultiplierSpec,
    samples: u64,
    seed: u64,
) -> impl Iterator<Item = (i64, i64)> {
    let range = spec.operand_range();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(move |_| {
        let x = rng.gen_range(range.clone());
        let y = rng.gen_range(range.clone());
        (x, y)
    })
}

pub fn accumulate_sampled(
    spec: &MultiplierSpec,
    samples: u64,
    seed: u64,
) -> Result<ErrorAccumulator> {
    spec.validate()?;
    if samples == 0 {
        return Err(Error::Config(
            "a sampled sweep needs at least one sample".into(),
        ));
    }
    let mut acc = ErrorAccumulator::new();
    acc.extend(sampled_pairs(spec, samples, seed).map(|(x, y)| error_of(spec, x, y)));
    Ok(acc)
}

pub fn sweep_sampled(spec: &MultiplierSpec, samples: u64, seed: u64) -> Result<ErrorReport> {
    Ok(accumulate_sampled(spec, samples, seed)?.report())
}

pub fn sweep(
    spec: &MultiplierSpec,
    mode: SweepMode,
    options: &SweepOptions,
) -> Result<ErrorReport> {
    match mode {
        SweepMode::Exhaustive => sweep_exhaustive_with(spec, options),
        SweepMode::Sampled { samples, seed } => sweep_sampled(spec, samples, seed),
    }
}

/// Error distribution with errors normalized to `2^(2·wl - 1)`.
///
/// Bins are uniform over `[-1, 1]`; values outside that interval are counted
/// in the outermost bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub normalization: f64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Percentage of input vectors per bin.
    pub fn percentages(&self) -> Vec<f64> {
        let total = self.total().max(1) as f64;
        self.counts
            .iter()
            .map(|&c| 100.0 * c as f64 / total)
            .collect()
    }
}

struct Binner {
    bins: i128,
    full_scale: i128,
}

impl Binner {
    #[inline]
    fn index(&self, error: i64) -> usize {
        // floor((e + F) * bins / 2F), exact in integers
        let scaled = (error as i128 + self.full_scale) * self.bins;
        scaled
            .div_euclid(2 * self.full_scale)
            .clamp(0, self.bins - 1) as usize
    }
}

pub fn error_histogram(
    spec: &MultiplierSpec,
    bins: usize,
    mode: SweepMode,
    options: &SweepOptions,
) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::Config("a histogram needs at least two bins".into()));
    }
    let full_scale = 1i128 << (2 * spec.wl - 1);
    let binner = Binner {
        bins: bins as i128,
        full_scale,
    };
    let counts = match mode {
        SweepMode::Exhaustive => exhaustive_fold(
            spec,
            options,
            || vec![0u64; bins],
            |counts, error| counts[binner.index(error)] += 1,
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(a, b)| *a += b);
                a
            },
        )?,
        SweepMode::Sampled { samples, seed } => {
            spec.validate()?;
            let mut counts = vec![0u64; bins];
            for (x, y) in sampled_pairs(spec, samples, seed) {
                counts[binner.index(error_of(spec, x, y))] += 1;
            }
            counts
        }
    };
    let bin_edges = (0..=bins)
        .map(|i| -1.0 + 2.0 * i as f64 / bins as f64)
        .collect();
    Ok(Histogram {
        bin_edges,
        counts,
        normalization: full_scale as f64,
    })
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub spec: MultiplierSpec,
    pub report: ErrorReport,
}

/// Characterizes `kind` at each value of its breaking parameter. Rows come
/// back sorted by parameter.
pub fn mse_vs_parameter_sweep(
    kind: MultiplierKind,
    wl: u32,
    parameters: &[u32],
    mode: SweepMode,
    options: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    let mut parameters = parameters.to_vec();
    parameters.sort_unstable();
    parameters.dedup();
    parameters
        .into_iter()
        .map(|p| {
            let spec = MultiplierSpec::with_parameter(kind, wl, p)?;
            let report = sweep(&spec, mode, options)?;
            Ok(SweepRow { spec, report })
        })
        .collect()
}
