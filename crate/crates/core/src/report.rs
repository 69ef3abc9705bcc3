//! Stable CSV and JSON renderings of characterization and filter results.
//!
//! CSV numbers carry six significant digits so that golden files do not
//! churn with the last bits of a floating-point sum.

use serde::Serialize;

use crate::fir::SnrPoint;
use crate::multiplier::MultiplierSpec;
use crate::stats::{ErrorReport, Histogram, SweepRow};

pub const SIGNIFICANT_DIGITS: usize = 6;

pub const ERROR_CSV_HEADER: &str = "kind,wl,vbl,hbl,k,n,mean,mse,error_prob,min_error,max_error";
pub const SNR_CSV_HEADER: &str = "wl,vbl,kind,snr_in_db,snr_out_db";
pub const HISTOGRAM_CSV_HEADER: &str = "bin_low,bin_high,count,percent";

/// Formats `value` with six significant digits: positional notation for
/// magnitudes in `[1e-5, 1e6)`, scientific otherwise.
pub fn fmt_sig(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if value.is_nan() {
        return "nan".to_string();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exponent = value.abs().log10().floor() as i32;
    if (-5..6).contains(&exponent) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
        format!("{value:.decimals$}")
    } else {
        format!("{value:.prec$e}", prec = SIGNIFICANT_DIGITS - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRecord {
    #[serde(flatten)]
    pub spec: MultiplierSpec,
    #[serde(flatten)]
    pub report: ErrorReport,
}

impl From<SweepRow> for ErrorRecord {
    fn from(row: SweepRow) -> Self {
        Self {
            spec: row.spec,
            report: row.report,
        }
    }
}

impl ErrorRecord {
    pub fn csv_row(&self) -> String {
        let (s, r) = (&self.spec, &self.report);
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.kind,
            s.wl,
            s.vbl,
            s.hbl,
            s.k,
            r.n,
            fmt_sig(r.mean),
            fmt_sig(r.mse),
            fmt_sig(r.error_probability),
            r.min_error,
            r.max_error
        )
    }
}

fn table<T>(header: &str, rows: &[T], row: impl Fn(&T) -> String) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&row(r));
        out.push('\n');
    }
    out
}

pub fn error_csv(records: &[ErrorRecord]) -> String {
    table(ERROR_CSV_HEADER, records, ErrorRecord::csv_row)
}

pub fn snr_csv_row(point: &SnrPoint) -> String {
    format!(
        "{},{},{},{},{}",
        point.wl,
        point.vbl,
        point.kind.map_or("double", |k| k.name()),
        fmt_sig(point.snr_in_db),
        fmt_sig(point.snr_out_db)
    )
}

pub fn snr_csv(points: &[SnrPoint]) -> String {
    table(SNR_CSV_HEADER, points, snr_csv_row)
}

pub fn histogram_csv(histogram: &Histogram) -> String {
    let percentages = histogram.percentages();
    let rows: Vec<usize> = (0..histogram.counts.len()).collect();
    table(HISTOGRAM_CSV_HEADER, &rows, |&i| {
        format!(
            "{},{},{},{}",
            fmt_sig(histogram.bin_edges[i]),
            fmt_sig(histogram.bin_edges[i + 1]),
            histogram.counts[i],
            fmt_sig(percentages[i])
        )
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}
