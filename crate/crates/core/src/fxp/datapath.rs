use num_complex::Complex64;

use super::format::{quantize, round_shift, Fixed, FixedPointFormat};
use super::lut::recip_lut;
use crate::detect::DetectorMode;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::modem::{Constellation, Scheme};

/// Complex fixed-point value; the format is implied by context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CFixed {
    pub re: i64,
    pub im: i64,
}

impl CFixed {
    pub fn quantize(x: Complex64, fmt: FixedPointFormat) -> Result<Self> {
        Ok(Self {
            re: quantize(x.re, fmt)?.raw,
            im: quantize(x.im, fmt)?.raw,
        })
    }

    pub fn to_complex(self, fmt: FixedPointFormat) -> Complex64 {
        Complex64::new(fmt.to_f64(self.re), fmt.to_f64(self.im))
    }
}

/// `ceil(log2(n))`, zero for `n <= 1`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Pairwise (balanced tree) sum with every partial sum checked against the
/// accumulator width.
fn tree_sum(mut terms: Vec<i128>, acc: FixedPointFormat) -> Result<i64> {
    if terms.is_empty() {
        return Ok(0);
    }
    for &t in &terms {
        acc.fit(t)?;
    }
    while terms.len() > 1 {
        let next: Vec<i128> = terms
            .chunks(2)
            .map(|pair| pair.iter().sum::<i128>())
            .collect();
        for &t in &next {
            acc.fit(t)?;
        }
        terms = next;
    }
    Ok(terms[0] as i64)
}

/// `a^H b` accumulated in the 36-bit accumulator paired with `fmt`
/// (fractional bits doubled), without normalization.
pub fn inner_product_acc(a: &[CFixed], b: &[CFixed], fmt: FixedPointFormat) -> Result<CFixed> {
    if a.len() != b.len() {
        return Err(Error::InputShape(format!(
            "inner product of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let acc = fmt.accumulator();
    let shift = 2 * fmt.frac_bits() - acc.frac_bits();
    let mut re = Vec::with_capacity(a.len());
    let mut im = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let (xr, xi, yr, yi) = (x.re as i128, x.im as i128, y.re as i128, y.im as i128);
        re.push(round_shift(xr * yr + xi * yi, shift));
        im.push(round_shift(xr * yi - xi * yr, shift));
    }
    Ok(CFixed {
        re: tree_sum(re, acc)?,
        im: tree_sum(im, acc)?,
    })
}

/// `a^H b` in the accumulator format, arithmetically shifted right by
/// `ceil(log2(B))` to compress its dynamic range.
pub fn inner_product_shifted(a: &[CFixed], b: &[CFixed], fmt: FixedPointFormat) -> Result<CFixed> {
    let sum = inner_product_acc(a, b, fmt)?;
    let shift = ceil_log2(a.len());
    Ok(CFixed {
        re: sum.re >> shift,
        im: sum.im >> shift,
    })
}

/// Result of [`ocd_fixed`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixedOcdOutput {
    /// Estimates in the signal format.
    pub z_raw: Vec<CFixed>,
    /// The same estimates as floating-point values (exact conversion).
    pub z: Vec<Complex64>,
    pub mult_count: u64,
}

/// Full-precision complex-by-real product.
fn scale(x: CFixed, s: i64) -> (i128, i128) {
    (x.re as i128 * s as i128, x.im as i128 * s as i128)
}

/// OCD on the fixed-point datapath.
///
/// Inputs are quantized into `fmt` on entry. Squared norms and inner products
/// come from the 36-bit accumulator shifted right by `ceil(log2 B)`; the
/// reciprocal of the shifted norm carries the matching left shift, so the
/// two cancel in `d^-1 h^H r`. Every stored signal is rounded back to `fmt`.
pub fn ocd_fixed(
    h: &CMatrix,
    y: &[Complex64],
    n0: f64,
    mode: DetectorMode,
    k: usize,
    c: &Constellation,
    fmt: FixedPointFormat,
) -> Result<FixedOcdOutput> {
    if y.len() != h.rows() {
        return Err(Error::InputShape(format!(
            "received vector has {} entries, channel has {} rows",
            y.len(),
            h.rows()
        )));
    }
    if k == 0 {
        return Err(Error::Parameter("at least one iteration is required".into()));
    }
    if !(n0 >= 0.0) {
        return Err(Error::Parameter(format!("noise variance must be >= 0, got {n0}")));
    }
    let (b, u) = (h.rows(), h.cols());
    let f = fmt.frac_bits();
    let acc = fmt.accumulator();
    let shift = ceil_log2(b);

    let cols: Vec<Vec<CFixed>> = (0..u)
        .map(|j| h.col(j).iter().map(|&x| CFixed::quantize(x, fmt)).collect())
        .collect::<Result<_>>()?;
    let mut r: Vec<CFixed> = y.iter().map(|&x| CFixed::quantize(x, fmt)).collect::<Result<_>>()?;

    // preprocessing
    let alpha = quantize(mode.regularizer(n0), acc)?.raw as i128;
    let mut d_inv = Vec::with_capacity(u);
    let mut p = Vec::with_capacity(u);
    for (j, col) in cols.iter().enumerate() {
        let norm = inner_product_acc(col, col, fmt)?.re as i128;
        if norm == 0 && mode == DetectorMode::Box {
            return Err(Error::DegenerateColumn { column: j });
        }
        let shifted = acc.fit(norm + alpha)? >> shift;
        let recip = recip_lut(Fixed {
            raw: shifted,
            frac_bits: acc.frac_bits(),
        })
        .map_err(|e| match e {
            Error::DivisionByZero => Error::DegenerateColumn { column: j },
            other => other,
        })?;
        let dj = recip.requantize(fmt)?;
        d_inv.push(dj);
        p.push(match mode {
            DetectorMode::Box => 1i64 << f,
            DetectorMode::Mmse => {
                let prod = dj as i128 * (norm >> shift);
                fmt.fit(round_shift(prod, acc.frac_bits()))?
            }
        });
    }

    let radius = quantize(c.box_radius(), fmt)?.raw;
    let bpsk = c.scheme() == Scheme::Bpsk;
    let mut z = vec![CFixed::default(); u];
    let mut mults = 0u64;
    for _ in 0..k {
        for j in 0..u {
            let col = &cols[j];
            let ip_acc = inner_product_shifted(col, &r, fmt)?;
            mults += 4 * b as u64;
            let ip = CFixed {
                re: Fixed { raw: ip_acc.re, frac_bits: acc.frac_bits() }.requantize(fmt)?,
                im: Fixed { raw: ip_acc.im, frac_bits: acc.frac_bits() }.requantize(fmt)?,
            };
            let old = z[j];
            let (ar, ai) = scale(ip, d_inv[j]);
            let (br, bi) = scale(old, p[j]);
            mults += 4;
            let mut new = CFixed {
                re: fmt.fit(round_shift(ar + br, f))?,
                im: fmt.fit(round_shift(ai + bi, f))?,
            };
            if mode == DetectorMode::Box {
                new.re = new.re.clamp(-radius, radius);
                new.im = if bpsk { 0 } else { new.im.clamp(-radius, radius) };
            }
            let delta = CFixed {
                re: fmt.fit(new.re as i128 - old.re as i128)?,
                im: fmt.fit(new.im as i128 - old.im as i128)?,
            };
            for (ri, hi) in r.iter_mut().zip(col) {
                let (hr, hm) = (hi.re as i128, hi.im as i128);
                let (dr, dm) = (delta.re as i128, delta.im as i128);
                let pr = hr * dr - hm * dm;
                let pi = hr * dm + hm * dr;
                ri.re = fmt.fit(round_shift(((ri.re as i128) << f) - pr, f))?;
                ri.im = fmt.fit(round_shift(((ri.im as i128) << f) - pi, f))?;
            }
            mults += 4 * b as u64;
            z[j] = new;
        }
    }
    Ok(FixedOcdOutput {
        z: z.iter().map(|v| v.to_complex(fmt)).collect(),
        z_raw: z,
        mult_count: mults,
    })
}
