use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::array::{BamSpec, BlockSpec};
use crate::booth::{self, Breaking};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiplierKind {
    AccurateBooth,
    BrokenBoothT0,
    BrokenBoothT1,
    Bam,
    Block,
}

impl MultiplierKind {
    pub const ALL: [MultiplierKind; 5] = [
        Self::AccurateBooth,
        Self::BrokenBoothT0,
        Self::BrokenBoothT1,
        Self::Bam,
        Self::Block,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::AccurateBooth => "accurate-booth",
            Self::BrokenBoothT0 => "broken-booth-t0",
            Self::BrokenBoothT1 => "broken-booth-t1",
            Self::Bam => "bam",
            Self::Block => "block",
        }
    }

    /// Booth variants take two's complement operands, the array baselines
    /// unsigned ones.
    pub fn is_signed(self) -> bool {
        matches!(
            self,
            Self::AccurateBooth | Self::BrokenBoothT0 | Self::BrokenBoothT1
        )
    }

    /// Name of the parameter a sweep over this kind varies.
    pub fn sweep_parameter(self) -> &'static str {
        match self {
            Self::Block => "k",
            _ => "vbl",
        }
    }
}

impl fmt::Display for MultiplierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MultiplierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|kind| kind.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown multiplier kind `{s}`")))
    }
}

/// A fully parameterised multiplier. Parameters that do not apply to `kind`
/// must be zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub kind: MultiplierKind,
    pub wl: u32,
    #[serde(default)]
    pub vbl: u32,
    #[serde(default)]
    pub hbl: u32,
    #[serde(default)]
    pub k: u32,
}

impl MultiplierSpec {
    pub fn accurate(wl: u32) -> Result<Self> {
        Self::new(MultiplierKind::AccurateBooth, wl, 0, 0, 0)
    }

    pub fn broken_t0(wl: u32, vbl: u32) -> Result<Self> {
        Self::new(MultiplierKind::BrokenBoothT0, wl, vbl, 0, 0)
    }

    pub fn broken_t1(wl: u32, vbl: u32) -> Result<Self> {
        Self::new(MultiplierKind::BrokenBoothT1, wl, vbl, 0, 0)
    }

    pub fn bam(wl: u32, vbl: u32, hbl: u32) -> Result<Self> {
        Self::new(MultiplierKind::Bam, wl, vbl, hbl, 0)
    }

    pub fn block(wl: u32, k: u32) -> Result<Self> {
        Self::new(MultiplierKind::Block, wl, 0, 0, k)
    }

    /// Builds a spec with the kind's single sweep parameter set to `value`.
    pub fn with_parameter(kind: MultiplierKind, wl: u32, value: u32) -> Result<Self> {
        match kind {
            MultiplierKind::AccurateBooth if value != 0 => Err(Error::Config(
                "accurate-booth has no breaking parameter".into(),
            )),
            MultiplierKind::AccurateBooth => Self::accurate(wl),
            MultiplierKind::Block => Self::block(wl, value),
            _ => Self::new(kind, wl, value, 0, 0),
        }
    }

    pub fn new(kind: MultiplierKind, wl: u32, vbl: u32, hbl: u32, k: u32) -> Result<Self> {
        let spec = Self {
            kind,
            wl,
            vbl,
            hbl,
            k,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let unused = |name: &str, value: u32| {
            if value != 0 {
                Err(Error::Config(format!(
                    "{name} does not apply to {}",
                    self.kind
                )))
            } else {
                Ok(())
            }
        };
        match self.kind {
            MultiplierKind::AccurateBooth => {
                booth::check_wl(self.wl)?;
                unused("vbl", self.vbl)?;
                unused("hbl", self.hbl)?;
                unused("k", self.k)
            }
            MultiplierKind::BrokenBoothT0 | MultiplierKind::BrokenBoothT1 => {
                booth::check_wl(self.wl)?;
                booth::check_vbl(self.vbl, self.wl)?;
                unused("hbl", self.hbl)?;
                unused("k", self.k)
            }
            MultiplierKind::Bam => {
                BamSpec::new(self.wl, self.vbl, self.hbl)?;
                unused("k", self.k)
            }
            MultiplierKind::Block => {
                BlockSpec::new(self.wl, self.k)?;
                unused("vbl", self.vbl)?;
                unused("hbl", self.hbl)
            }
        }
    }

    /// The value of the kind's sweep parameter.
    pub fn parameter(&self) -> u32 {
        match self.kind {
            MultiplierKind::Block => self.k,
            _ => self.vbl,
        }
    }

    pub fn operand_range(&self) -> RangeInclusive<i64> {
        if self.kind.is_signed() {
            let half = 1i64 << (self.wl - 1);
            -half..=half - 1
        } else {
            0..=(1i64 << self.wl) - 1
        }
    }

    pub fn input_vectors(&self) -> u128 {
        1u128 << (2 * self.wl)
    }

    pub fn check_operand(&self, value: i64) -> Result<()> {
        if self.operand_range().contains(&value) {
            Ok(())
        } else {
            Err(Error::Operand {
                value,
                wl: self.wl,
                signedness: if self.kind.is_signed() {
                    "signed"
                } else {
                    "unsigned"
                },
            })
        }
    }

    pub fn multiply(&self, x: i64, y: i64) -> Result<i64> {
        self.check_operand(x)?;
        self.check_operand(y)?;
        Ok(self.multiply_unchecked(x, y))
    }

    /// Product of two in-range operands. The spec must have been validated.
    #[inline]
    pub fn multiply_unchecked(&self, x: i64, y: i64) -> i64 {
        match self.kind {
            MultiplierKind::AccurateBooth => {
                booth::broken_unchecked(x, y, self.wl, 0, Breaking::Type0)
            }
            MultiplierKind::BrokenBoothT0 => {
                booth::broken_unchecked(x, y, self.wl, self.vbl, Breaking::Type0)
            }
            MultiplierKind::BrokenBoothT1 => {
                booth::broken_unchecked(x, y, self.wl, self.vbl, Breaking::Type1)
            }
            MultiplierKind::Bam => BamSpec {
                wl: self.wl,
                vbl: self.vbl,
                hbl: self.hbl,
            }
            .multiply_unchecked(x as u64, y as u64) as i64,
            MultiplierKind::Block => BlockSpec {
                wl: self.wl,
                k: self.k,
            }
            .multiply_unchecked(x as u64, y as u64) as i64,
        }
    }
}

impl fmt::Display for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} wl={}", self.kind, self.wl)?;
        match self.kind {
            MultiplierKind::AccurateBooth => Ok(()),
            MultiplierKind::BrokenBoothT0 | MultiplierKind::BrokenBoothT1 => {
                write!(f, " vbl={}", self.vbl)
            }
            MultiplierKind::Bam => write!(f, " vbl={} hbl={}", self.vbl, self.hbl),
            MultiplierKind::Block => write!(f, " k={}", self.k),
        }
    }
}
