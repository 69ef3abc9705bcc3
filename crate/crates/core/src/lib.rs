//! Bit-accurate models of approximate multipliers and the tooling to
//! characterize them.
//!
//! * [`booth`]: radix-4 modified Booth multiplier with Type0/Type1 vertical
//!   breaking, plus a dot-count hardware proxy.
//! * [`array`]: unsigned broken-array and 2×2-block baselines.
//! * [`stats`]: exhaustive and sampled error statistics, histograms and
//!   parameter sweeps.
//! * [`fir`]: fixed-point low-pass FIR testbed with SNR measurement and the
//!   QUAP figure of merit.

pub mod array;
pub mod booth;
pub mod error;
pub mod fir;
pub mod fixed;
pub mod multiplier;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
pub use multiplier::{MultiplierKind, MultiplierSpec};
