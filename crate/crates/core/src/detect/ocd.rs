use num_complex::Complex64;

use super::{check_shapes, DetectorMode, EqualizerOutput};
use crate::error::{Error, Result};
use crate::linalg::{norm_sq, CMatrix};
use crate::modem::Constellation;

/// Quantities precomputed once per channel and reused in every sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct OcdPreprocessed {
    /// `1 / (|h_u|^2 + alpha)`
    pub d_inv: Vec<f64>,
    /// `d_inv[u] * |h_u|^2`; exactly one in BOX mode.
    pub p: Vec<f64>,
    pub col_norms_sq: Vec<f64>,
}

/// Regularized inverse squared column norms and gains.
pub fn ocd_preprocess(h: &CMatrix, mode: DetectorMode, n0: f64) -> Result<OcdPreprocessed> {
    let alpha = mode.regularizer(n0);
    if alpha < 0.0 {
        return Err(Error::Parameter(format!("noise variance must be >= 0, got {n0}")));
    }
    let col_norms_sq: Vec<f64> = (0..h.cols()).map(|u| norm_sq(h.col(u))).collect();
    let mut d_inv = Vec::with_capacity(col_norms_sq.len());
    let mut p = Vec::with_capacity(col_norms_sq.len());
    for (u, &n) in col_norms_sq.iter().enumerate() {
        let d = n + alpha;
        if !(d > 0.0) || (mode == DetectorMode::Box && n == 0.0) {
            return Err(Error::DegenerateColumn { column: u });
        }
        d_inv.push(1.0 / d);
        p.push(match mode {
            DetectorMode::Box => 1.0,
            DetectorMode::Mmse => n / d,
        });
    }
    Ok(OcdPreprocessed {
        d_inv,
        p,
        col_norms_sq,
    })
}

/// Runs `k` OCD sweeps. Returns the estimate and the number of real
/// multiplications spent in the sweeps.
pub fn ocd_equalize(
    h: &CMatrix,
    y: &[Complex64],
    prep: &OcdPreprocessed,
    mode: DetectorMode,
    k: usize,
    c: &Constellation,
) -> Result<(Vec<Complex64>, u64)> {
    ocd_equalize_observed(h, y, prep, mode, k, c, |_, _, _, _| {})
}

/// [`ocd_equalize`] with a callback after every coordinate update. The
/// callback receives `(sweep, user, z, r)` where `r` is the maintained
/// residual.
pub fn ocd_equalize_observed<F>(
    h: &CMatrix,
    y: &[Complex64],
    prep: &OcdPreprocessed,
    mode: DetectorMode,
    k: usize,
    c: &Constellation,
    mut observe: F,
) -> Result<(Vec<Complex64>, u64)>
where
    F: FnMut(usize, usize, &[Complex64], &[Complex64]),
{
    check_shapes(h, y)?;
    let u = h.cols();
    if prep.d_inv.len() != u || prep.p.len() != u {
        return Err(Error::InputShape(format!(
            "preprocessing for {} users, channel has {u}",
            prep.d_inv.len()
        )));
    }
    if k == 0 {
        return Err(Error::Parameter("at least one iteration is required".into()));
    }

    let b = h.rows() as u64;
    let mut r = y.to_vec();
    let mut z = vec![Complex64::new(0.0, 0.0); u];
    let mut mults = 0u64;
    for sweep in 0..k {
        for uu in 0..u {
            let col = h.col(uu);
            let ip: Complex64 = col.iter().zip(&r).map(|(hi, ri)| hi.conj() * ri).sum();
            mults += 4 * b;
            let old = z[uu];
            let w = ip * prep.d_inv[uu] + old * prep.p[uu];
            mults += 4;
            let new = mode.project(w, c);
            let delta = new - old;
            for (ri, hi) in r.iter_mut().zip(col) {
                *ri -= hi * delta;
            }
            mults += 4 * b;
            z[uu] = new;
            observe(sweep, uu, &z, &r);
        }
    }
    Ok((z, mults))
}

/// OCD equalization with approximate soft outputs.
///
/// Gains are `mu_u = |h_u|^2 / (|h_u|^2 + N0)`. BOX mode uses the same
/// N0-regularized norms for its gains; with `alpha = 0` the estimate would be
/// identically one.
pub fn ocd_detect(
    h: &CMatrix,
    y: &[Complex64],
    n0: f64,
    mode: DetectorMode,
    k: usize,
    c: &Constellation,
) -> Result<EqualizerOutput> {
    let prep = ocd_preprocess(h, mode, n0)?;
    let (z, mults) = ocd_equalize(h, y, &prep, mode, k, c)?;
    let mu = approximate_gains(&prep.col_norms_sq, n0);
    EqualizerOutput::from_gains(z, mu, c, k, mults)
}

pub(crate) fn approximate_gains(col_norms_sq: &[f64], n0: f64) -> Vec<f64> {
    col_norms_sq.iter().map(|&g| g / (g + n0)).collect()
}
