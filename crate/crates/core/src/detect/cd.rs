use num_complex::Complex64;

use super::{check_shapes, DetectorMode};
use crate::error::{Error, Result};
use crate::linalg::{norm_sq, CMatrix};
use crate::modem::Constellation;

/// Textbook coordinate descent: every coordinate update rebuilds
/// `y - sum_{j != u} h_j z_j` from scratch.
///
/// Returns the estimate after `k` sweeps and the number of real
/// multiplications spent in the sweeps.
pub fn cd_reference(
    h: &CMatrix,
    y: &[Complex64],
    n0: f64,
    mode: DetectorMode,
    k: usize,
    c: &Constellation,
) -> Result<(Vec<Complex64>, u64)> {
    check_shapes(h, y)?;
    if k == 0 {
        return Err(Error::Parameter("at least one iteration is required".into()));
    }
    let (b, u) = (h.rows(), h.cols());
    let alpha = mode.regularizer(n0);
    let denom: Vec<f64> = (0..u).map(|j| norm_sq(h.col(j)) + alpha).collect();
    if let Some(col) = denom.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::DegenerateColumn { column: col });
    }

    let mut z = vec![Complex64::new(0.0, 0.0); u];
    let mut e = vec![Complex64::new(0.0, 0.0); b];
    let mut mults = 0u64;
    for _ in 0..k {
        for uu in 0..u {
            e.copy_from_slice(y);
            for j in (0..u).filter(|&j| j != uu) {
                for (ei, hj) in e.iter_mut().zip(h.col(j)) {
                    *ei -= hj * z[j];
                }
                mults += 4 * b as u64;
            }
            let ip: Complex64 = h.col(uu).iter().zip(&e).map(|(hi, ei)| hi.conj() * ei).sum();
            mults += 4 * b as u64;
            let w = ip * (1.0 / denom[uu]);
            mults += 2;
            z[uu] = mode.project(w, c);
        }
    }
    Ok((z, mults))
}
