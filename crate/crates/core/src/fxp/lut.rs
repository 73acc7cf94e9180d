//! Normalized-reciprocal lookup table.
//!
//! A positive input is normalized into `[0.5, 1)` by a leading-zero count.
//! The normalized value is `0.1xxxxxxxxxxx...` in binary; the 11 bits after
//! the leading one select one of 2048 entries. Entry `k` holds `1 / x_k`,
//! `x_k = (2048 + k + 0.5) / 4096` (the bin midpoint), as an unsigned 18-bit
//! word with 17 fractional bits. The result is denormalized by a shift.

use std::path::Path;
use std::sync::OnceLock;

use super::format::Fixed;
use crate::error::{Error, Result};

pub const LUT_INDEX_BITS: u32 = 11;
pub const LUT_ENTRIES: usize = 1 << LUT_INDEX_BITS;
pub const LUT_WORD_BITS: u32 = 18;
pub const LUT_FRAC_BITS: u32 = 17;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReciprocalLut {
    entries: Vec<u32>,
}

impl Default for ReciprocalLut {
    fn default() -> Self {
        Self::new()
    }
}

impl ReciprocalLut {
    pub fn new() -> Self {
        let scale = (LUT_FRAC_BITS as f64).exp2();
        let entries = (0..LUT_ENTRIES)
            .map(|k| {
                let mid = (LUT_ENTRIES as f64 + k as f64 + 0.5) / (2 * LUT_ENTRIES) as f64;
                (scale / mid).round() as u32
            })
            .collect();
        Self { entries }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Approximates `1 / x`.
    pub fn reciprocal(&self, x: Fixed) -> Result<Fixed> {
        if x.raw == 0 {
            return Err(Error::DivisionByZero);
        }
        if x.raw < 0 {
            return Err(Error::Parameter(format!("reciprocal of negative value {}", x.to_f64())));
        }
        let msb = 63 - x.raw.leading_zeros();
        let below = if msb >= LUT_INDEX_BITS {
            x.raw >> (msb - LUT_INDEX_BITS)
        } else {
            x.raw << (LUT_INDEX_BITS - msb)
        };
        let index = (below as usize) & (LUT_ENTRIES - 1);
        let entry = self.entries[index] as i64;
        // x = m 2^(msb + 1 - f) with m in [0.5, 1), so 1/x = entry 2^-(17 + msb + 1 - f)
        let exp = LUT_FRAC_BITS as i64 + msb as i64 + 1 - x.frac_bits as i64;
        if exp >= 0 {
            Ok(Fixed {
                raw: entry,
                frac_bits: exp as u32,
            })
        } else {
            let up = (-exp) as u32;
            if up + LUT_WORD_BITS >= 63 {
                return Err(Error::Range("reciprocal exceeds 64 bits".into()));
            }
            Ok(Fixed {
                raw: entry << up,
                frac_bits: 0,
            })
        }
    }

    /// 2048 little-endian 32-bit words, low 18 bits significant.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.entries.iter().flat_map(|e| e.to_le_bytes()).collect()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 4 * LUT_ENTRIES {
            return Err(Error::LutFormat(format!(
                "expected {} bytes, got {}",
                4 * LUT_ENTRIES,
                bytes.len()
            )));
        }
        let entries: Vec<u32> = bytes
            .chunks_exact(4)
            .map(|w| u32::from_le_bytes([w[0], w[1], w[2], w[3]]))
            .collect();
        if let Some(i) = entries.iter().position(|&e| e >> LUT_WORD_BITS != 0) {
            return Err(Error::LutFormat(format!("entry {i} uses more than {LUT_WORD_BITS} bits")));
        }
        Ok(Self { entries })
    }

    pub fn dump(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

/// Reciprocal through the shared default table.
pub fn recip_lut(x: Fixed) -> Result<Fixed> {
    static LUT: OnceLock<ReciprocalLut> = OnceLock::new();
    LUT.get_or_init(ReciprocalLut::new).reciprocal(x)
}
