use crate::error::{Error, Result};

/// Signed two's complement Q1.(wl-1): one sign bit, `wl - 1` fraction bits,
/// covering `[-1, 1 - 2^-(wl-1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPointFormat {
    wl: u32,
}

impl FixedPointFormat {
    pub fn new(wl: u32) -> Result<Self> {
        if !(2..=32).contains(&wl) {
            return Err(Error::WordLength {
                wl,
                reason: "fixed-point word length must lie in 2..=32",
            });
        }
        Ok(Self { wl })
    }

    pub fn wl(&self) -> u32 {
        self.wl
    }

    pub fn frac_bits(&self) -> u32 {
        self.wl - 1
    }

    pub fn lsb(&self) -> f64 {
        (-(self.frac_bits() as f64)).exp2()
    }

    pub fn min_raw(&self) -> i64 {
        -(1i64 << self.frac_bits())
    }

    pub fn max_raw(&self) -> i64 {
        (1i64 << self.frac_bits()) - 1
    }

    pub fn max_value(&self) -> f64 {
        self.decode(self.max_raw())
    }

    /// Round-to-nearest (ties away from zero). Values that round outside the
    /// representable range are an error, never saturated.
    pub fn encode(&self, value: f64) -> Option<i64> {
        let raw = (value * (self.frac_bits() as f64).exp2()).round();
        (raw >= self.min_raw() as f64 && raw <= self.max_raw() as f64).then_some(raw as i64)
    }

    pub fn decode(&self, raw: i64) -> f64 {
        raw as f64 * self.lsb()
    }

    /// Encodes a whole sequence, reporting the first sample that overflows.
    pub fn encode_all(&self, values: &[f64]) -> Result<Vec<i64>> {
        values
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                self.encode(value).ok_or(Error::FixedPointOverflow {
                    index,
                    value,
                    frac_bits: self.frac_bits(),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn range_of_q1_15() {
        let q = FixedPointFormat::new(16).unwrap();
        assert_eq!(q.frac_bits(), 15);
        assert_eq!(q.min_raw(), -32768);
        assert_eq!(q.max_raw(), 32767);
        assert_eq!(q.encode(-1.0), Some(-32768));
        assert_eq!(q.encode(1.0), None);
        assert_eq!(q.encode(q.max_value()), Some(32767));
    }

    #[test]
    fn rounding_is_to_nearest() {
        let q = FixedPointFormat::new(4).unwrap();
        assert_eq!(q.encode(0.3), Some(2)); // 2.4 LSB
        assert_eq!(q.encode(0.32), Some(3)); // 2.56 LSB
        assert_eq!(q.encode(-0.3), Some(-2));
        assert_eq!(q.encode(1.0 / 16.0), Some(1)); // tie away from zero
    }

    #[test]
    fn overflow_is_reported() {
        let q = FixedPointFormat::new(8).unwrap();
        let err = q.encode_all(&[0.0, 0.5, 1.2]).unwrap_err();
        assert!(matches!(err, Error::FixedPointOverflow { index: 2, .. }));
    }

    proptest! {
        #[test]
        fn decode_then_encode_is_identity(wl in 2u32..=24, raw in any::<i64>()) {
            let q = FixedPointFormat::new(wl).unwrap();
            let raw = raw.rem_euclid(q.max_raw() - q.min_raw() + 1) + q.min_raw();
            prop_assert_eq!(q.encode(q.decode(raw)), Some(raw));
        }

        #[test]
        fn quantization_error_is_half_lsb(wl in 2u32..=24, value in -1.0f64..0.99) {
            let q = FixedPointFormat::new(wl).unwrap();
            if let Some(raw) = q.encode(value) {
                prop_assert!((q.decode(raw) - value).abs() <= q.lsb() / 2.0 + 1e-15);
            }
        }
    }
}
