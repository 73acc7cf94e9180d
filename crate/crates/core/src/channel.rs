//! i.i.d. Rayleigh channels, AWGN, and Eb/N0 bookkeeping.
//!
//! Every generator is a pure function of its shape, parameters and seed. The
//! underlying stream is ChaCha12, seeded from a 64-bit value.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// One subcarrier: `y = H s + n` with noise variance `n0` per complex entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    pub h: CMatrix,
    pub s: Vec<Complex64>,
    pub n: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub n0: f64,
}

impl ChannelInstance {
    pub fn new(h: CMatrix, s: Vec<Complex64>, n: Vec<Complex64>, n0: f64) -> Result<Self> {
        if !(n0 > 0.0) {
            return Err(Error::Parameter(format!("noise variance must be positive, got {n0}")));
        }
        let y = transmit(&h, &s, &n)?;
        Ok(Self { h, s, n, y, n0 })
    }

    /// Recomputes `H s + n` and compares it with the stored `y`.
    pub fn is_consistent(&self) -> bool {
        transmit(&self.h, &self.s, &self.n).is_ok_and(|y| y == self.y)
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a master seed and a path of
/// indices, e.g. `(grid point, trial, purpose)`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p.wrapping_add(0x632b_e59b_d9b4_e019))))
}

fn complex_gaussian(rng: &mut ChaCha12Rng, variance: f64) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(sd * re, sd * im)
}

/// `B x U` channel with i.i.d. unit-variance circularly-symmetric complex
/// Gaussian entries.
pub fn gen_channel(b: usize, u: usize, seed: u64) -> Result<CMatrix> {
    if u == 0 || b < u {
        return Err(Error::Configuration(format!(
            "need B >= U >= 1, got B = {b}, U = {u}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let data = (0..b * u).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
    CMatrix::from_col_major(b, u, data)
}

/// `B` complex noise samples with variance `n0` per entry.
pub fn gen_noise(b: usize, n0: f64, seed: u64) -> Result<Vec<Complex64>> {
    if !(n0 >= 0.0) || !n0.is_finite() {
        return Err(Error::Parameter(format!("noise variance must be >= 0, got {n0}")));
    }
    if n0 == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); b]);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..b).map(|_| complex_gaussian(&mut rng, n0)).collect())
}

/// Noise variance for a target Eb/N0, assuming `E|s|^2 = U` and
/// `E|n|^2 = B N0`.
pub fn n0_from_ebn0(ebn0_db: f64, q: usize, u: usize, b: usize) -> f64 {
    u as f64 / (q as f64 * b as f64 * 10f64.powf(ebn0_db / 10.0))
}

/// `H s + n`.
pub fn transmit(h: &CMatrix, s: &[Complex64], n: &[Complex64]) -> Result<Vec<Complex64>> {
    if n.len() != h.rows() {
        return Err(Error::InputShape(format!(
            "{} noise samples for {} antennas",
            n.len(),
            h.rows()
        )));
    }
    let mut y = h.mul_vec(s)?;
    for (yi, ni) in y.iter_mut().zip(n) {
        *yi += ni;
    }
    Ok(y)
}
