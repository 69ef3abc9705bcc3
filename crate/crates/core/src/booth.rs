//! Radix-4 modified Booth multiplication as an explicit partial-product
//! matrix, and the two vertical-breaking truncation schemes built on it.
//!
//! Every row is carried as a full-width (2·WL bit) residue. A row for a
//! negative Booth digit is stored as the one's complement of the shifted
//! magnitude with a separate S bit at the row's least significant column,
//! because the two breaking types differ only in what happens to that bit:
//!
//! * Type0 absorbs the S bit first (the row becomes a two's complement
//!   residue) and then clears every column below the VBL.
//! * Type1 clears the columns below the VBL from the one's complement row
//!   and adds the S bit back only when its column survived.

use crate::error::{Error, Result};

pub const MIN_WL: u32 = 4;
pub const MAX_WL: u32 = 16;

/// Rejects odd word lengths and anything outside `MIN_WL..=MAX_WL`.
pub fn check_wl(wl: u32) -> Result<()> {
    if !(MIN_WL..=MAX_WL).contains(&wl) {
        return Err(Error::WordLength {
            wl,
            reason: "Booth word length must lie in 4..=16",
        });
    }
    if !wl.is_multiple_of(2) {
        return Err(Error::WordLength {
            wl,
            reason: "Booth word length must be even",
        });
    }
    Ok(())
}

pub(crate) fn check_vbl(vbl: u32, wl: u32) -> Result<()> {
    if vbl > 2 * wl {
        return Err(Error::Parameter {
            name: "vbl",
            value: vbl,
            max: 2 * wl,
        });
    }
    Ok(())
}

pub(crate) fn check_signed(value: i64, wl: u32) -> Result<()> {
    let half = 1i64 << (wl - 1);
    if value < -half || value >= half {
        return Err(Error::Operand {
            value,
            wl,
            signedness: "signed",
        });
    }
    Ok(())
}

#[inline]
fn width_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Reads a `bits`-wide residue as two's complement.
#[inline]
pub(crate) fn to_signed(residue: u64, bits: u32) -> i64 {
    let residue = residue & width_mask(bits);
    if residue >> (bits - 1) & 1 == 1 {
        residue as i64 - (1i64 << bits)
    } else {
        residue as i64
    }
}

/// One radix-4 Booth digit in `{-2, -1, 0, 1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoothDigit(i8);

impl BoothDigit {
    pub fn new(value: i8) -> Option<Self> {
        (-2..=2).contains(&value).then_some(Self(value))
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

/// Digit `i` of the recoding: `-2·y[2i+1] + y[2i] + y[2i-1]` with `y[-1] = 0`.
#[inline]
fn digit_at(y: i64, i: u32) -> i64 {
    let b0 = (y >> (2 * i)) & 1;
    let b1 = (y >> (2 * i + 1)) & 1;
    let prev = if i == 0 { 0 } else { (y >> (2 * i - 1)) & 1 };
    -2 * b1 + b0 + prev
}

/// Radix-4 recoding of a signed `wl`-bit multiplier into `wl / 2` digits,
/// least significant first.
pub fn booth_recode(y: i64, wl: u32) -> Result<Vec<BoothDigit>> {
    check_wl(wl)?;
    check_signed(y, wl)?;
    Ok((0..wl / 2)
        .map(|i| BoothDigit(digit_at(y, i) as i8))
        .collect())
}

/// A single Booth partial product in dot-diagram form.
///
/// `magnitude_bits` is already shifted by `2 · row_index` and sign extended
/// to the full product width. For a complemented row it holds the one's
/// complement pattern and `s_bit` carries the pending `+1` at `s_column`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialProductRow {
    pub magnitude_bits: u64,
    pub s_bit: bool,
    pub s_column: u32,
}

impl PartialProductRow {
    #[inline]
    fn new(x: i64, digit: i64, index: u32, wl: u32) -> Self {
        let mask = width_mask(2 * wl);
        let shift = 2 * index;
        if digit >= 0 || x == 0 {
            Self {
                magnitude_bits: ((digit * x) << shift) as u64 & mask,
                s_bit: false,
                s_column: shift,
            }
        } else {
            let shifted = ((-digit * x) << shift) as u64;
            Self {
                magnitude_bits: !shifted & mask & !width_mask(shift),
                s_bit: true,
                s_column: shift,
            }
        }
    }

    #[inline]
    fn s_value(&self) -> u64 {
        (self.s_bit as u64) << self.s_column
    }

    /// Two's complement residue of `digit · x · 4^i` with the S bit absorbed.
    #[inline]
    pub fn residue(&self, wl: u32) -> u64 {
        (self.magnitude_bits + self.s_value()) & width_mask(2 * wl)
    }

    /// Row contribution under Type0 breaking.
    #[inline]
    pub fn broken_type0(&self, wl: u32, vbl: u32) -> u64 {
        self.residue(wl) & !width_mask(vbl)
    }

    /// Row contribution under Type1 breaking.
    #[inline]
    pub fn broken_type1(&self, vbl: u32) -> u64 {
        let kept = self.magnitude_bits & !width_mask(vbl);
        if self.s_column >= vbl {
            kept + self.s_value()
        } else {
            kept
        }
    }
}

/// The full partial-product matrix of one Booth multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotDiagram {
    wl: u32,
    rows: Vec<PartialProductRow>,
}

impl DotDiagram {
    pub fn build(x: i64, y: i64, wl: u32) -> Result<Self> {
        check_wl(wl)?;
        check_signed(x, wl)?;
        check_signed(y, wl)?;
        let rows = (0..wl / 2)
            .map(|i| PartialProductRow::new(x, digit_at(y, i), i, wl))
            .collect();
        Ok(Self { wl, rows })
    }

    pub fn wl(&self) -> u32 {
        self.wl
    }

    pub fn rows(&self) -> &[PartialProductRow] {
        &self.rows
    }

    fn fold(&self, row_value: impl Fn(&PartialProductRow) -> u64) -> i64 {
        let mask = width_mask(2 * self.wl);
        let sum = self
            .rows
            .iter()
            .fold(0u64, |acc, row| (acc + row_value(row)) & mask);
        to_signed(sum, 2 * self.wl)
    }

    /// Reconstructed exact product.
    pub fn sum(&self) -> i64 {
        self.fold(|row| row.residue(self.wl))
    }

    pub fn sum_type0(&self, vbl: u32) -> i64 {
        self.fold(|row| row.broken_type0(self.wl, vbl))
    }

    pub fn sum_type1(&self, vbl: u32) -> i64 {
        self.fold(|row| row.broken_type1(vbl))
    }
}

/// Which breaking scheme is applied to the partial-product matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Breaking {
    Type0,
    Type1,
}

/// Allocation-free kernel shared by the public entry points and the sweeps.
/// Callers guarantee that `wl`, `vbl` and the operands are in range.
#[inline]
pub(crate) fn broken_unchecked(x: i64, y: i64, wl: u32, vbl: u32, breaking: Breaking) -> i64 {
    let mask = width_mask(2 * wl);
    let mut sum = 0u64;
    for i in 0..wl / 2 {
        let row = PartialProductRow::new(x, digit_at(y, i), i, wl);
        let value = match breaking {
            Breaking::Type0 => row.broken_type0(wl, vbl),
            Breaking::Type1 => row.broken_type1(vbl),
        };
        sum = (sum + value) & mask;
    }
    to_signed(sum, 2 * wl)
}

fn checked(x: i64, y: i64, wl: u32, vbl: u32, breaking: Breaking) -> Result<i64> {
    check_wl(wl)?;
    check_vbl(vbl, wl)?;
    check_signed(x, wl)?;
    check_signed(y, wl)?;
    Ok(broken_unchecked(x, y, wl, vbl, breaking))
}

/// Exact signed product through the Booth partial-product path.
pub fn multiply_accurate(x: i64, y: i64, wl: u32) -> Result<i64> {
    checked(x, y, wl, 0, Breaking::Type0)
}

pub fn multiply_broken_t0(x: i64, y: i64, wl: u32, vbl: u32) -> Result<i64> {
    checked(x, y, wl, vbl, Breaking::Type0)
}

pub fn multiply_broken_t1(x: i64, y: i64, wl: u32, vbl: u32) -> Result<i64> {
    checked(x, y, wl, vbl, Breaking::Type1)
}

/// Dot layout of the compact partial-product diagram used for hardware-cost
/// counting.
///
/// Every row has `wl + 1` magnitude dots starting at column `2i`. When
/// `separate_s_dots` is set the S bit of each row is one more dot at column
/// `2i`; a Type0 diagram absorbs it into the row instead. `sign_dots_per_row`
/// adds sign-encoding dots directly above each row's magnitude; dots that
/// would land at or beyond column `2·wl` are not part of the product and are
/// not counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DotLayout {
    pub separate_s_dots: bool,
    pub sign_dots_per_row: u32,
}

impl DotLayout {
    pub const TYPE0: Self = Self {
        separate_s_dots: false,
        sign_dots_per_row: 0,
    };
    pub const TYPE1: Self = Self {
        separate_s_dots: true,
        sign_dots_per_row: 0,
    };

    pub fn for_breaking(breaking: Breaking) -> Self {
        match breaking {
            Breaking::Type0 => Self::TYPE0,
            Breaking::Type1 => Self::TYPE1,
        }
    }
}

impl Default for DotLayout {
    fn default() -> Self {
        Self::TYPE0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DotCount {
    pub total: u32,
    pub nullified: u32,
}

impl DotCount {
    pub fn fraction(&self) -> f64 {
        self.nullified as f64 / self.total as f64
    }
}

/// Counts dots of the default (Type0) layout: 78 in total for `wl = 12`,
/// 36 of which sit right of `vbl = 11`.
pub fn dot_count(wl: u32, vbl: u32) -> Result<DotCount> {
    dot_count_with(DotLayout::default(), wl, vbl)
}

pub fn dot_count_with(layout: DotLayout, wl: u32, vbl: u32) -> Result<DotCount> {
    check_wl(wl)?;
    check_vbl(vbl, wl)?;
    let width = 2 * wl;
    let mut count = DotCount {
        total: 0,
        nullified: 0,
    };
    let mut place = |column: u32| {
        if column < width {
            count.total += 1;
            if column < vbl {
                count.nullified += 1;
            }
        }
    };
    for row in 0..wl / 2 {
        let base = 2 * row;
        for column in base..=base + wl {
            place(column);
        }
        if layout.separate_s_dots {
            place(base);
        }
        for extra in 1..=layout.sign_dots_per_row {
            place(base + wl + extra);
        }
    }
    Ok(count)
}
