//! Unsigned baseline multipliers: the broken-array multiplier (BAM) and a
//! multiplier tiled from 2×2 blocks whose low-order blocks are replaced by
//! an inaccurate cell.

use crate::error::{Error, Result};

pub const MAX_ARRAY_WL: u32 = 16;

fn check_unsigned(value: u64, wl: u32) -> Result<()> {
    if value >> wl != 0 {
        return Err(Error::Operand {
            value: value as i64,
            wl,
            signedness: "unsigned",
        });
    }
    Ok(())
}

/// Broken-array multiplier parameters.
///
/// Partial-product bit `x_i · y_j` sits at column `i + j`. Columns below
/// `vbl` are dropped, and so are the top `hbl` rows (`j >= wl - hbl`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BamSpec {
    pub wl: u32,
    pub vbl: u32,
    pub hbl: u32,
}

impl BamSpec {
    pub fn new(wl: u32, vbl: u32, hbl: u32) -> Result<Self> {
        if !(2..=MAX_ARRAY_WL).contains(&wl) {
            return Err(Error::WordLength {
                wl,
                reason: "array multiplier word length must lie in 2..=16",
            });
        }
        if vbl > 2 * wl {
            return Err(Error::Parameter {
                name: "vbl",
                value: vbl,
                max: 2 * wl,
            });
        }
        if hbl > wl {
            return Err(Error::Parameter {
                name: "hbl",
                value: hbl,
                max: wl,
            });
        }
        Ok(Self { wl, vbl, hbl })
    }

    #[inline]
    pub(crate) fn multiply_unchecked(&self, x: u64, y: u64) -> u64 {
        let keep = !((1u64 << self.vbl) - 1);
        (0..self.wl - self.hbl)
            .filter(|j| (y >> j) & 1 == 1)
            .map(|j| (x << j) & keep)
            .sum()
    }
}

pub fn multiply_bam(x: u64, y: u64, spec: &BamSpec) -> Result<u64> {
    check_unsigned(x, spec.wl)?;
    check_unsigned(y, spec.wl)?;
    Ok(spec.multiply_unchecked(x, y))
}

/// The 2×2 building block. The inaccurate cell differs from the exact one
/// only at `3 × 3`, which it reports as 7 so the output fits in three bits.
#[inline]
pub fn multiply_block2x2(a: u8, b: u8, approximate: bool) -> u8 {
    debug_assert!(a < 4 && b < 4);
    if approximate && a == 3 && b == 3 {
        7
    } else {
        a * b
    }
}

/// Parameters of the block multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    pub wl: u32,
    pub k: u32,
}

impl BlockSpec {
    pub fn new(wl: u32, k: u32) -> Result<Self> {
        if !(2..=MAX_ARRAY_WL).contains(&wl) || !wl.is_power_of_two() {
            return Err(Error::WordLength {
                wl,
                reason: "block multiplier word length must be a power of two in 2..=16",
            });
        }
        if k > 2 * wl {
            return Err(Error::Parameter {
                name: "k",
                value: k,
                max: 2 * wl,
            });
        }
        Ok(Self { wl, k })
    }

    /// A block whose four output columns all lie right of the K line uses the
    /// inaccurate cell. Blocks straddling the line stay accurate.
    #[inline]
    pub fn is_approximate(&self, i: u32, j: u32) -> bool {
        2 * (i + j) + 3 < self.k
    }

    #[inline]
    pub(crate) fn multiply_unchecked(&self, x: u64, y: u64) -> u64 {
        let pairs = self.wl / 2;
        let mut sum = 0u64;
        for i in 0..pairs {
            let a = ((x >> (2 * i)) & 3) as u8;
            if a == 0 {
                continue;
            }
            for j in 0..pairs {
                let b = ((y >> (2 * j)) & 3) as u8;
                let block = multiply_block2x2(a, b, self.is_approximate(i, j));
                sum += (block as u64) << (2 * (i + j));
            }
        }
        sum
    }
}

pub fn multiply_blockapprox(x: u64, y: u64, spec: &BlockSpec) -> Result<u64> {
    check_unsigned(x, spec.wl)?;
    check_unsigned(y, spec.wl)?;
    Ok(spec.multiply_unchecked(x, y))
}
