use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the inner-product accumulator.
pub const ACCUMULATOR_BITS: u32 = 36;

/// A two's-complement (or unsigned) fixed-point format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedPointFormat {
    total_bits: u32,
    frac_bits: u32,
    signed: bool,
    saturate: bool,
}

impl FixedPointFormat {
    /// 16-bit signed, 11 fractional bits, saturating.
    pub const Q16_11: FixedPointFormat = FixedPointFormat {
        total_bits: 16,
        frac_bits: 11,
        signed: true,
        saturate: true,
    };

    pub fn new(total_bits: u32, frac_bits: u32, signed: bool, saturate: bool) -> Result<Self> {
        let max_total = if signed { 64 } else { 63 };
        if total_bits == 0 || total_bits > max_total || frac_bits >= total_bits {
            return Err(Error::Parameter(format!(
                "unsupported fixed-point format {total_bits}:{frac_bits}"
            )));
        }
        Ok(Self {
            total_bits,
            frac_bits,
            signed,
            saturate,
        })
    }

    /// Signed saturating format.
    pub fn signed(total_bits: u32, frac_bits: u32) -> Result<Self> {
        Self::new(total_bits, frac_bits, true, true)
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn saturates(&self) -> bool {
        self.saturate
    }

    /// Accumulator paired with this format: 36 bits, full-precision
    /// products, overflow is an error.
    pub fn accumulator(&self) -> Self {
        Self {
            total_bits: ACCUMULATOR_BITS,
            frac_bits: (2 * self.frac_bits).min(ACCUMULATOR_BITS - 1),
            signed: true,
            saturate: false,
        }
    }

    pub fn max_raw(&self) -> i64 {
        if self.signed {
            ((1i128 << (self.total_bits - 1)) - 1) as i64
        } else {
            ((1i128 << self.total_bits) - 1) as i64
        }
    }

    pub fn min_raw(&self) -> i64 {
        if self.signed {
            (-(1i128 << (self.total_bits - 1))) as i64
        } else {
            0
        }
    }

    pub fn step(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    pub fn max_value(&self) -> f64 {
        self.max_raw() as f64 * self.step()
    }

    pub fn min_value(&self) -> f64 {
        self.min_raw() as f64 * self.step()
    }

    /// Brings a raw value into range: clamps when saturating, else errors.
    pub fn fit(&self, raw: i128) -> Result<i64> {
        let (lo, hi) = (self.min_raw() as i128, self.max_raw() as i128);
        if raw < lo || raw > hi {
            if self.saturate {
                Ok(raw.clamp(lo, hi) as i64)
            } else {
                Err(Error::Range(format!("{raw} outside {self} raw range [{lo}, {hi}]")))
            }
        } else {
            Ok(raw as i64)
        }
    }

    pub fn to_f64(&self, raw: i64) -> f64 {
        raw as f64 * self.step()
    }
}

impl fmt::Display for FixedPointFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.total_bits, self.frac_bits)?;
        if !self.signed {
            f.write_str("u")?;
        }
        Ok(())
    }
}

impl FromStr for FixedPointFormat {
    type Err = Error;

    /// Parses `total:frac`, e.g. `16:11` (signed, saturating).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Configuration(format!("fixed-point format '{s}' is not <total>:<frac>"));
        let (t, f) = s.split_once(':').ok_or_else(bad)?;
        let t = t.trim().parse().map_err(|_| bad())?;
        let f = f.trim().parse().map_err(|_| bad())?;
        Self::signed(t, f).map_err(|e| Error::Configuration(e.to_string()))
    }
}

/// Divides by `2^shift`, rounding to nearest with ties away from zero.
pub(crate) fn round_shift(v: i128, shift: u32) -> i128 {
    if shift == 0 {
        return v;
    }
    let half = 1i128 << (shift - 1);
    if v >= 0 {
        (v + half) >> shift
    } else {
        -((-v + half) >> shift)
    }
}

/// A raw integer with an implied binary point `frac_bits` from the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fixed {
    pub raw: i64,
    pub frac_bits: u32,
}

impl Fixed {
    pub fn to_f64(self) -> f64 {
        self.raw as f64 * (-(self.frac_bits as f64)).exp2()
    }

    /// Exact product; fractional bits add.
    pub fn widening_mul(self, other: Fixed) -> Result<Fixed> {
        let raw = (self.raw as i128) * (other.raw as i128);
        let raw = i64::try_from(raw).map_err(|_| Error::Range("product exceeds 64 bits".into()))?;
        Ok(Fixed {
            raw,
            frac_bits: self.frac_bits + other.frac_bits,
        })
    }

    /// Re-rounds into `fmt` (round to nearest, ties away from zero).
    pub fn requantize(self, fmt: FixedPointFormat) -> Result<i64> {
        let raw = self.raw as i128;
        let scaled = if self.frac_bits >= fmt.frac_bits() {
            round_shift(raw, self.frac_bits - fmt.frac_bits())
        } else {
            let up = fmt.frac_bits() - self.frac_bits;
            if up >= 64 {
                return Err(Error::Range("rescale shift too large".into()));
            }
            raw << up
        };
        fmt.fit(scaled)
    }
}

/// Rounds a real to the nearest representable value (ties away from zero).
pub fn quantize(x: f64, fmt: FixedPointFormat) -> Result<Fixed> {
    if x.is_nan() {
        return Err(Error::Range("NaN cannot be quantized".into()));
    }
    let scaled = (x * (fmt.frac_bits() as f64).exp2()).round();
    let raw = if scaled >= i128::MAX as f64 {
        i128::MAX
    } else if scaled <= i128::MIN as f64 {
        i128::MIN
    } else {
        scaled as i128
    };
    Ok(Fixed {
        raw: fmt.fit(raw)?,
        frac_bits: fmt.frac_bits(),
    })
}
