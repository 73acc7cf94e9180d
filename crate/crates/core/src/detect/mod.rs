//! Equalizers: exact MMSE, naive coordinate descent, and optimized coordinate
//! descent (OCD) in MMSE and BOX modes, with soft outputs.

mod cd;
mod mmse;
mod ocd;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm_sq, CMatrix};
use crate::modem::{llr_maxlog_into, Constellation, LlrVector, Scheme};

pub use cd::cd_reference;
pub use mmse::mmse_exact;
pub(crate) use ocd::approximate_gains;
pub use ocd::{ocd_detect, ocd_equalize, ocd_equalize_observed, ocd_preprocess, OcdPreprocessed};

/// Largest SINR reported when the gain estimate reaches one.
pub const RHO_CLAMP: f64 = 1e9;
/// Gains at or above `1 - GAIN_CLAMP_MARGIN` are clamped.
pub const GAIN_CLAMP_MARGIN: f64 = 1e-9;

/// Regularizer selection. MMSE penalizes `N0 |z|^2`; BOX constrains each
/// entry to the box around the constellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorMode {
    Mmse,
    Box,
}

impl DetectorMode {
    /// The `alpha` added to the squared column norms.
    pub fn regularizer(self, n0: f64) -> f64 {
        match self {
            DetectorMode::Mmse => n0,
            DetectorMode::Box => 0.0,
        }
    }

    /// Projection onto the feasible set: identity for MMSE, box clip for BOX.
    pub fn project(self, w: Complex64, c: &Constellation) -> Complex64 {
        match self {
            DetectorMode::Mmse => w,
            DetectorMode::Box => crate::modem::project_box(w, c),
        }
    }
}

impl fmt::Display for DetectorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorMode::Mmse => "mmse",
            DetectorMode::Box => "box",
        })
    }
}

impl FromStr for DetectorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mmse" => Ok(DetectorMode::Mmse),
            "box" => Ok(DetectorMode::Box),
            other => Err(Error::Configuration(format!("unknown detector mode '{other}'"))),
        }
    }
}

/// Symbol estimates plus soft information.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerOutput {
    pub z: Vec<Complex64>,
    pub mu: Vec<f64>,
    pub rho: Vec<f64>,
    pub llrs: LlrVector,
    pub iterations_used: usize,
    /// Real-valued multiplications spent in the iterative loop. Zero for the
    /// closed-form detector, which is not instrumented.
    pub mult_count: u64,
    /// Users whose gain estimate reached one and whose SINR was clamped.
    pub gain_clamped: Vec<bool>,
}

impl EqualizerOutput {
    /// Attaches SINRs and LLRs to estimates and gains.
    pub(crate) fn from_gains(
        z: Vec<Complex64>,
        mu: Vec<f64>,
        c: &Constellation,
        iterations_used: usize,
        mult_count: u64,
    ) -> Result<Self> {
        let mut rho = Vec::with_capacity(mu.len());
        let mut gain_clamped = Vec::with_capacity(mu.len());
        for &m in &mu {
            if m >= 1.0 - GAIN_CLAMP_MARGIN {
                rho.push(RHO_CLAMP);
                gain_clamped.push(true);
            } else {
                rho.push(m / (1.0 - m));
                gain_clamped.push(false);
            }
        }
        let mut llrs = LlrVector::zeros(z.len(), c.bits_per_symbol());
        for (i, (&zi, (&m, &r))) in z.iter().zip(mu.iter().zip(&rho)).enumerate() {
            llr_maxlog_into(zi, m, r, c, llrs.user_mut(i)).map_err(|e| match e {
                Error::DegenerateGain { .. } => Error::DegenerateGain { user: i },
                other => other,
            })?;
        }
        Ok(Self {
            z,
            mu,
            rho,
            llrs,
            iterations_used,
            mult_count,
            gain_clamped,
        })
    }

    /// Slices `z / mu` per user.
    pub fn hard_symbols(&self, c: &Constellation) -> Vec<Complex64> {
        self.z
            .iter()
            .zip(&self.mu)
            .map(|(&z, &m)| crate::modem::slice_hard(z / m, c))
            .collect()
    }
}

fn check_shapes(h: &CMatrix, y: &[Complex64]) -> Result<()> {
    if y.len() != h.rows() {
        return Err(Error::InputShape(format!(
            "received vector has {} entries, channel has {} rows",
            y.len(),
            h.rows()
        )));
    }
    Ok(())
}

/// Gram matrix `H^H H` and matched filter `H^H y`.
pub fn gram_and_mf(h: &CMatrix, y: &[Complex64]) -> Result<(CMatrix, Vec<Complex64>)> {
    check_shapes(h, y)?;
    let u = h.cols();
    let mut g = CMatrix::zeros(u, u);
    for j in 0..u {
        for i in 0..=j {
            let v = crate::linalg::inner(h.col(i), h.col(j));
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
        g[(j, j)] = Complex64::new(g[(j, j)].re, 0.0);
    }
    let mf = (0..u).map(|i| crate::linalg::inner(h.col(i), y)).collect();
    Ok((g, mf))
}

/// `|y - H z|^2 + g(z)` with `g = N0 |z|^2` (MMSE) or the box indicator (BOX).
/// Returns `f64::INFINITY` for BOX when `z` leaves the box.
pub fn objective_value(
    h: &CMatrix,
    y: &[Complex64],
    z: &[Complex64],
    mode: DetectorMode,
    n0: f64,
    c: &Constellation,
) -> Result<f64> {
    check_shapes(h, y)?;
    let hz = h.mul_vec(z)?;
    let residual: f64 = y.iter().zip(&hz).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok(match mode {
        DetectorMode::Mmse => residual + n0 * norm_sq(z),
        DetectorMode::Box => {
            let a = c.box_radius();
            let inside = z.iter().all(|w| {
                w.re.abs() <= a && w.im.abs() <= a && (c.scheme() != Scheme::Bpsk || w.im == 0.0)
            });
            if inside {
                residual
            } else {
                f64::INFINITY
            }
        }
    })
}

/// Real multiplications of `K` naive CD sweeps: `K (4 B U^2 + 2 U)`.
pub fn multiplication_count_cd(b: u64, u: u64, k: u64) -> u64 {
    k * (4 * b * u * u + 2 * u)
}

/// Real multiplications of `K` OCD sweeps: `K (8 B U + 4 U)`.
pub fn multiplication_count_ocd(b: u64, u: u64, k: u64) -> u64 {
    k * (8 * b * u + 4 * u)
}
