#![allow(dead_code)]

use ocd_core::channel::derive_seed;
use ocd_core::{
    build_constellation, gen_channel, gen_noise, map_bits, n0_from_ebn0, transmit, CMatrix, Complex64, Constellation,
    Scheme,
};

pub struct Instance {
    pub h: CMatrix,
    pub s: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub n0: f64,
}

/// Random 64-QAM (or other) instance at a given Eb/N0.
pub fn instance(b: usize, u: usize, scheme: Scheme, ebn0_db: f64, seed: u64) -> Instance {
    let con = build_constellation(scheme);
    let q = con.bits_per_symbol();
    let bits: Vec<u8> = (0..u * q).map(|i| (derive_seed(seed, &[7, i as u64]) >> 11 & 1) as u8).collect();
    let s = map_bits(&bits, &con).unwrap();
    let h = gen_channel(b, u, derive_seed(seed, &[1])).unwrap();
    let n0 = n0_from_ebn0(ebn0_db, q, u, b);
    let n = gen_noise(b, n0, derive_seed(seed, &[2])).unwrap();
    let y = transmit(&h, &s, &n).unwrap();
    Instance { h, s, y, n0 }
}

pub fn constellation(scheme: Scheme) -> Constellation {
    build_constellation(scheme)
}

/// `y - H z` by explicit double loop.
pub fn residual(h: &CMatrix, y: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
    (0..h.rows())
        .map(|r| {
            let mut acc = y[r];
            for c in 0..h.cols() {
                acc -= h[(r, c)] * z[c];
            }
            acc
        })
        .collect()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `H^H H + reg I` by explicit loops.
pub fn regularized_gram(h: &CMatrix, reg: f64) -> Vec<Vec<Complex64>> {
    let u = h.cols();
    let mut a = vec![vec![Complex64::new(0.0, 0.0); u]; u];
    for i in 0..u {
        for j in 0..u {
            for r in 0..h.rows() {
                a[i][j] += h[(r, i)].conj() * h[(r, j)];
            }
        }
        a[i][i] += reg;
    }
    a
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(mut a: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let mut inv: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm())).unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                for j in 0..n {
                    let (ac, ic) = (a[col][j], inv[col][j]);
                    a[row][j] -= f * ac;
                    inv[row][j] -= f * ic;
                }
            }
        }
    }
    inv
}

/// Exact MMSE estimate via the explicit inverse.
pub fn mmse_by_inverse(h: &CMatrix, y: &[Complex64], n0: f64) -> Vec<Complex64> {
    let inv = inverse(regularized_gram(h, n0));
    let mf: Vec<Complex64> = (0..h.cols())
        .map(|i| (0..h.rows()).map(|r| h[(r, i)].conj() * y[r]).sum())
        .collect();
    inv.iter().map(|row| row.iter().zip(&mf).map(|(a, b)| a * b).sum()).collect()
}
