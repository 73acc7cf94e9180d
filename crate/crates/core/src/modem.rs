//! Constellations, Gray labelling, hard slicing, box projection and max-log
//! soft demapping.
//!
//! Square QAM labels use a reflected Gray code per axis: the first `Q/2` bits
//! select the in-phase level, the last `Q/2` the quadrature level. Within an
//! axis, bit pattern `0..0` maps to the most negative level, so BPSK maps
//! `0 -> -1` and `1 -> +1`. Points are stored in label order, which makes
//! `points[label]` the mapping table.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Bpsk, Scheme::Qpsk, Scheme::Qam16, Scheme::Qam64];

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Scheme::Bpsk => 1,
            Scheme::Qpsk => 2,
            Scheme::Qam16 => 4,
            Scheme::Qam64 => 6,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Bpsk => "bpsk",
            Scheme::Qpsk => "qpsk",
            Scheme::Qam16 => "qam16",
            Scheme::Qam64 => "qam64",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Scheme::Bpsk),
            "qpsk" => Ok(Scheme::Qpsk),
            "qam16" | "16qam" | "16-qam" => Ok(Scheme::Qam16),
            "qam64" | "64qam" | "64-qam" => Ok(Scheme::Qam64),
            other => Err(Error::Configuration(format!("unknown modulation '{other}'"))),
        }
    }
}

/// A finite, unit-average-power symbol alphabet with Gray bit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    scheme: Scheme,
    points: Vec<Complex64>,
    labels: Vec<u32>,
    bits: usize,
    box_radius: f64,
}

fn gray_inverse(mut g: u32) -> u32 {
    let mut i = g;
    while g > 1 {
        g >>= 1;
        i ^= g;
    }
    i
}

impl Constellation {
    pub fn new(scheme: Scheme) -> Self {
        let q = scheme.bits_per_symbol();
        let size = 1usize << q;
        let (points, labels): (Vec<_>, Vec<_>) = match scheme {
            Scheme::Bpsk => (0..2u32)
                .map(|l| (Complex64::new(2.0 * l as f64 - 1.0, 0.0), l))
                .unzip(),
            _ => {
                let axis_bits = q / 2;
                let levels = 1u32 << axis_bits;
                // mean energy of a square grid with odd-integer levels
                let scale = (2.0 * ((levels * levels) as f64 - 1.0) / 3.0).sqrt();
                let amplitude = |g: u32| (2.0 * gray_inverse(g) as f64 - (levels - 1) as f64) / scale;
                (0..size as u32)
                    .map(|l| {
                        let re = l >> axis_bits;
                        let im = l & (levels - 1);
                        (Complex64::new(amplitude(re), amplitude(im)), l)
                    })
                    .unzip()
            }
        };
        let box_radius = points.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        Self {
            scheme,
            points,
            labels,
            bits: q,
            box_radius,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Label of each point, MSB first: bit `b` of point `i` is
    /// `(labels[i] >> (Q - 1 - b)) & 1`.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    pub fn label_bit(&self, index: usize, bit: usize) -> u8 {
        ((self.labels[index] >> (self.bits - 1 - bit)) & 1) as u8
    }

    /// Index of the nearest point; ties go to the lowest index.
    pub fn nearest_index(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

/// Builds one of the supported constellations.
pub fn build_constellation(scheme: Scheme) -> Constellation {
    Constellation::new(scheme)
}

/// Maps a bit sequence (values 0/1, `Q` bits per symbol, MSB first) to symbols.
pub fn map_bits(bits: &[u8], c: &Constellation) -> Result<Vec<Complex64>> {
    let q = c.bits_per_symbol();
    if !bits.len().is_multiple_of(q) {
        return Err(Error::InputShape(format!(
            "{} bits is not a multiple of {q} bits per symbol",
            bits.len()
        )));
    }
    bits.chunks(q)
        .map(|group| {
            let mut label = 0u32;
            for &b in group {
                if b > 1 {
                    return Err(Error::InputShape(format!("bit value {b}")));
                }
                label = (label << 1) | b as u32;
            }
            Ok(c.points[label as usize])
        })
        .collect()
}

/// Nearest constellation point.
pub fn slice_hard(z: Complex64, c: &Constellation) -> Complex64 {
    c.points[c.nearest_index(z)]
}

/// Orthogonal projection onto the tightest box around the constellation.
pub fn project_box(w: Complex64, c: &Constellation) -> Complex64 {
    let a = c.box_radius;
    match c.scheme {
        Scheme::Bpsk => Complex64::new(w.re.clamp(-a, a), 0.0),
        _ => Complex64::new(w.re.clamp(-a, a), w.im.clamp(-a, a)),
    }
}

/// Max-log LLRs of one equalized symbol. Positive values favour bit 1.
pub fn llr_maxlog(z: Complex64, mu: f64, rho: f64, c: &Constellation) -> Result<Vec<f64>> {
    let mut out = vec![0.0; c.bits_per_symbol()];
    llr_maxlog_into(z, mu, rho, c, &mut out)?;
    Ok(out)
}

pub(crate) fn llr_maxlog_into(
    z: Complex64,
    mu: f64,
    rho: f64,
    c: &Constellation,
    out: &mut [f64],
) -> Result<()> {
    if mu == 0.0 {
        return Err(Error::DegenerateGain { user: 0 });
    }
    let q = c.bits_per_symbol();
    let x = z / mu;
    let mut min0 = [f64::INFINITY; 8];
    let mut min1 = [f64::INFINITY; 8];
    for (i, p) in c.points.iter().enumerate() {
        let d = (x - p).norm_sqr();
        let label = c.labels[i];
        for b in 0..q {
            if (label >> (q - 1 - b)) & 1 == 0 {
                min0[b] = min0[b].min(d);
            } else {
                min1[b] = min1[b].min(d);
            }
        }
    }
    for b in 0..q {
        out[b] = rho * (min0[b] - min1[b]);
    }
    Ok(())
}

/// Per-user, per-bit LLRs.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector {
    values: Vec<f64>,
    bits: usize,
}

impl LlrVector {
    pub fn zeros(users: usize, bits: usize) -> Self {
        Self {
            values: vec![0.0; users * bits],
            bits,
        }
    }

    pub fn users(&self) -> usize {
        self.values.len() / self.bits.max(1)
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    pub fn get(&self, user: usize, bit: usize) -> f64 {
        self.values[user * self.bits + bit]
    }

    pub fn user(&self, user: usize) -> &[f64] {
        &self.values[user * self.bits..(user + 1) * self.bits]
    }

    pub(crate) fn user_mut(&mut self, user: usize) -> &mut [f64] {
        &mut self.values[user * self.bits..(user + 1) * self.bits]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Hard decisions: 1 where the LLR is positive.
    pub fn hard_bits(&self) -> Vec<u8> {
        self.values.iter().map(|&l| u8::from(l > 0.0)).collect()
    }
}
