//! Naive reference models, written without reusing any library internals.

#![allow(dead_code)]

/// Booth digit from the bit triplet (y[2i+1], y[2i], y[2i-1]).
const TRIPLET_DIGIT: [i128; 8] = [0, 1, 1, 2, -2, -1, -1, 0];

fn bit(v: i128, i: i64) -> usize {
    if i < 0 {
        0
    } else {
        ((v >> i) & 1) as usize
    }
}

pub fn booth_digits(y: i64, wl: u32) -> Vec<i128> {
    let y = y as i128;
    (0..wl as i64 / 2)
        .map(|i| {
            let triplet = bit(y, 2 * i + 1) << 2 | bit(y, 2 * i) << 1 | bit(y, 2 * i - 1);
            TRIPLET_DIGIT[triplet]
        })
        .collect()
}

fn signed(residue: i128, bits: u32) -> i64 {
    let modulus = 1i128 << bits;
    let r = residue.rem_euclid(modulus);
    (if r >= modulus / 2 { r - modulus } else { r }) as i64
}

fn drop_below(value: i128, column: u32) -> i128 {
    value - value.rem_euclid(1i128 << column)
}

/// Masked-row residue sum, S bits absorbed before masking.
pub fn booth_t0(x: i64, y: i64, wl: u32, vbl: u32) -> i64 {
    let modulus = 1i128 << (2 * wl);
    let total: i128 = booth_digits(y, wl)
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let row = (d * x as i128 * 4i128.pow(i as u32)).rem_euclid(modulus);
            drop_below(row, vbl)
        })
        .sum();
    signed(total, 2 * wl)
}

/// Masked-row residue sum where a complemented row is masked as its one's
/// complement pattern and keeps its +1 only if column 2i survives.
pub fn booth_t1(x: i64, y: i64, wl: u32, vbl: u32) -> i64 {
    let modulus = 1i128 << (2 * wl);
    let total: i128 = booth_digits(y, wl)
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let weight = 4i128.pow(i as u32);
            let two_complement = (d * x as i128 * weight).rem_euclid(modulus);
            if d >= 0 || x == 0 {
                drop_below(two_complement, vbl)
            } else {
                let ones = (two_complement - weight).rem_euclid(modulus);
                let s = if 2 * i as u32 >= vbl { weight } else { 0 };
                drop_below(ones, vbl) + s
            }
        })
        .sum();
    signed(total, 2 * wl)
}

/// Σ x_i·y_j·2^(i+j) over i+j >= vbl and j < wl - hbl.
pub fn bam(x: u64, y: u64, wl: u32, vbl: u32, hbl: u32) -> u64 {
    let mut total = 0;
    for i in 0..wl {
        for j in 0..wl {
            if i + j >= vbl && j < wl - hbl {
                total += (((x >> i) & 1) * ((y >> j) & 1)) << (i + j);
            }
        }
    }
    total
}

const EXACT_CELL: [[u64; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 4, 6], [0, 3, 6, 9]];
const APPROX_CELL: [[u64; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 4, 6], [0, 3, 6, 7]];

/// Per-block table lookup; a block is approximate when all four of its
/// output columns lie below k.
pub fn block(x: u64, y: u64, wl: u32, k: u32) -> u64 {
    let mut total = 0;
    for i in 0..wl / 2 {
        for j in 0..wl / 2 {
            let a = ((x >> (2 * i)) & 3) as usize;
            let b = ((y >> (2 * j)) & 3) as usize;
            let low = 2 * (i + j);
            let approximate = (low..low + 4).all(|column| column < k);
            let cell = if approximate { APPROX_CELL } else { EXACT_CELL };
            total += cell[a][b] << low;
        }
    }
    total
}

pub fn signed_range(wl: u32) -> std::ops::RangeInclusive<i64> {
    -(1i64 << (wl - 1))..=(1i64 << (wl - 1)) - 1
}

pub fn unsigned_range(wl: u32) -> std::ops::Range<u64> {
    0..1u64 << wl
}

/// Exhaustive MSE computed directly from a product function.
pub fn mse_signed(wl: u32, f: impl Fn(i64, i64) -> i64) -> f64 {
    let mut sum = 0i128;
    for x in signed_range(wl) {
        for y in signed_range(wl) {
            let e = (f(x, y) - x * y) as i128;
            sum += e * e;
        }
    }
    sum as f64 / (1u64 << (2 * wl)) as f64
}

pub fn mse_unsigned(wl: u32, f: impl Fn(u64, u64) -> u64) -> f64 {
    let mut sum = 0i128;
    for x in unsigned_range(wl) {
        for y in unsigned_range(wl) {
            let e = f(x, y) as i128 - (x * y) as i128;
            sum += e * e;
        }
    }
    sum as f64 / (1u64 << (2 * wl)) as f64
}
