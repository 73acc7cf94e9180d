use num_complex::Complex64;

use super::{gram_and_mf, EqualizerOutput};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Cholesky};
use crate::modem::Constellation;

/// Closed-form MMSE equalization with exact per-user gains.
///
/// Solves `(G + N0 I) z = H^H y` by Cholesky. The gain of user `i` is
/// `mu_i = [A^-1 G]_ii`, taken from the explicit inverse.
pub fn mmse_exact(h: &CMatrix, y: &[Complex64], n0: f64, c: &Constellation) -> Result<EqualizerOutput> {
    if !(n0 > 0.0) {
        return Err(Error::Parameter(format!("exact MMSE needs N0 > 0, got {n0}")));
    }
    let (g, mf) = gram_and_mf(h, y)?;
    let u = g.rows();
    let mut a = g.clone();
    for i in 0..u {
        a[(i, i)] += n0;
    }
    let chol = Cholesky::new(&a)?;
    let z = chol.solve(&mf)?;
    let inv = chol.inverse();
    let mu = (0..u)
        .map(|i| (0..u).map(|k| inv[(i, k)] * g[(k, i)]).sum::<Complex64>().re)
        .collect();
    EqualizerOutput::from_gains(z, mu, c, 0, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gen_channel;
    use crate::linalg::{inner, norm_sq};
    use crate::modem::{build_constellation, Scheme};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_user_closed_form() {
        let con = build_constellation(Scheme::Qam16);
        let h = gen_channel(6, 1, 4).unwrap();
        let y: Vec<_> = (0..6).map(|i| c(0.2 * i as f64, -0.4)).collect();
        let out = mmse_exact(&h, &y, 0.5, &con).unwrap();
        let nh = norm_sq(h.col(0));
        let expect = inner(h.col(0), &y) / (nh + 0.5);
        assert!((out.z[0] - expect).norm() < 1e-12);
        assert!((out.mu[0] - nh / (nh + 0.5)).abs() < 1e-12);
        assert!((out.rho[0] - out.mu[0] / (1.0 - out.mu[0])).abs() < 1e-10);
    }

    #[test]
    fn orthonormal_columns() {
        let con = build_constellation(Scheme::Qpsk);
        let h = CMatrix::from_fn(4, 2, |r, col| if r == col { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let y = vec![c(1.0, 1.0), c(-2.0, 0.5), c(3.0, 3.0), c(0.0, 1.0)];
        let out = mmse_exact(&h, &y, 1.0, &con).unwrap();
        assert!((out.z[0] - y[0] / 2.0).norm() < 1e-14);
        assert!((out.z[1] - y[1] / 2.0).norm() < 1e-14);
        for u in 0..2 {
            assert!((out.mu[u] - 0.5).abs() < 1e-14);
            assert!((out.rho[u] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_noise_and_shapes() {
        let con = build_constellation(Scheme::Qpsk);
        let h = gen_channel(4, 2, 1).unwrap();
        let y = vec![c(0.0, 0.0); 4];
        assert!(matches!(mmse_exact(&h, &y, 0.0, &con), Err(Error::Parameter(_))));
        assert!(matches!(mmse_exact(&h, &y[..3], 0.1, &con), Err(Error::InputShape(_))));
    }
}
