//! Fast self-checks behind the `verify` command: a small randomized subset
//! of the property suite that finishes in well under a second.

use num_complex::Complex64;

use crate::channel::{derive_seed, gen_channel, gen_noise, n0_from_ebn0, transmit};
use crate::detect::{
    cd_reference, mmse_exact, multiplication_count_ocd, objective_value, ocd_equalize, ocd_equalize_observed,
    ocd_preprocess, DetectorMode,
};
use crate::error::Result;
use crate::fxp::{latency_cycles, latency_seconds, Fixed, ReciprocalLut, LUT_ENTRIES};
use crate::linalg::CMatrix;
use crate::modem::{build_constellation, map_bits, Constellation, Scheme};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Instance {
    h: CMatrix,
    y: Vec<Complex64>,
    n0: f64,
}

fn instance(b: usize, u: usize, ebn0_db: f64, con: &Constellation, seed: u64) -> Result<Instance> {
    let q = con.bits_per_symbol();
    let bits: Vec<u8> = (0..u * q)
        .map(|i| (derive_seed(seed, &[9, i as u64]) & 1) as u8)
        .collect();
    let s = map_bits(&bits, con)?;
    let h = gen_channel(b, u, derive_seed(seed, &[1]))?;
    let n0 = n0_from_ebn0(ebn0_db, q, u, b);
    let n = gen_noise(b, n0, derive_seed(seed, &[2]))?;
    let y = transmit(&h, &s, &n)?;
    Ok(Instance { h, y, n0 })
}

fn rel_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / y.norm().max(1e-300))
        .fold(0.0, f64::max)
}

fn ocd_matches_cd(con: &Constellation) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let inst = instance(32 << (seed % 3), 4 + 4 * (seed as usize % 2), 0.0, con, seed)?;
        for mode in [DetectorMode::Mmse, DetectorMode::Box] {
            let k = 1 + seed as usize % 5;
            let prep = ocd_preprocess(&inst.h, mode, inst.n0)?;
            let (z, _) = ocd_equalize(&inst.h, &inst.y, &prep, mode, k, con)?;
            let (zc, _) = cd_reference(&inst.h, &inst.y, inst.n0, mode, k, con)?;
            worst = worst.max(rel_dev(&z, &zc));
        }
    }
    Ok(Check {
        name: "ocd-equals-cd",
        passed: worst < 1e-9,
        detail: format!("max relative deviation {worst:.3e}"),
    })
}

fn residual_and_descent(con: &Constellation) -> Result<Vec<Check>> {
    let mut worst_r: f64 = 0.0;
    let mut worst_rise = f64::NEG_INFINITY;
    for seed in 0..5u64 {
        let inst = instance(64, 8, 5.0, con, 100 + seed)?;
        for mode in [DetectorMode::Mmse, DetectorMode::Box] {
            let prep = ocd_preprocess(&inst.h, mode, inst.n0)?;
            let mut prev = objective_value(&inst.h, &inst.y, &[Complex64::new(0.0, 0.0); 8], mode, inst.n0, con)?;
            ocd_equalize_observed(&inst.h, &inst.y, &prep, mode, 4, con, |_, _, z, r| {
                let hz = inst.h.mul_vec(z).expect("shape");
                let fresh: Vec<Complex64> = inst.y.iter().zip(&hz).map(|(a, b)| a - b).collect();
                let scale = fresh.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
                let err = fresh.iter().zip(r).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                worst_r = worst_r.max(err / scale);
                let f = objective_value(&inst.h, &inst.y, z, mode, inst.n0, con).expect("shape");
                worst_rise = worst_rise.max(f - prev);
                prev = f;
            })?;
        }
    }
    Ok(vec![
        Check {
            name: "residual-identity",
            passed: worst_r < 1e-9,
            detail: format!("max relative residual drift {worst_r:.3e}"),
        },
        Check {
            name: "monotone-descent",
            passed: worst_rise <= 1e-12,
            detail: format!("largest objective increase {worst_rise:.3e}"),
        },
    ])
}

fn mmse_convergence(con: &Constellation) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for seed in 0..3u64 {
        let inst = instance(128, 8, 10.0, con, 200 + seed)?;
        let exact = mmse_exact(&inst.h, &inst.y, inst.n0, con)?;
        let prep = ocd_preprocess(&inst.h, DetectorMode::Mmse, inst.n0)?;
        let (z, _) = ocd_equalize(&inst.h, &inst.y, &prep, DetectorMode::Mmse, 50, con)?;
        let num: f64 = z.iter().zip(&exact.z).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = exact.z.iter().map(|a| a.norm_sqr()).sum();
        worst = worst.max((num / den).sqrt());
    }
    Ok(Check {
        name: "mmse-convergence",
        passed: worst < 1e-6,
        detail: format!("relative error after 50 sweeps {worst:.3e}"),
    })
}

fn counts(con: &Constellation) -> Result<Check> {
    let inst = instance(128, 8, 10.0, con, 300)?;
    let prep = ocd_preprocess(&inst.h, DetectorMode::Mmse, inst.n0)?;
    let (_, mults) = ocd_equalize(&inst.h, &inst.y, &prep, DetectorMode::Mmse, 1, con)?;
    let expect = multiplication_count_ocd(128, 8, 1);
    Ok(Check {
        name: "multiplication-count",
        passed: mults == expect && expect == 8224,
        detail: format!("instrumented {mults}, closed form {expect}"),
    })
}

fn lut_bound() -> Result<Check> {
    let lut = ReciprocalLut::new();
    // every 16-bit mantissa in [0.5, 1) covers each bin at both edges
    let mut worst: f64 = 0.0;
    for raw in (LUT_ENTRIES as i64 * 16)..(LUT_ENTRIES as i64 * 32) {
        let x = Fixed { raw, frac_bits: 16 };
        let r = lut.reciprocal(x)?.to_f64();
        worst = worst.max((r * x.to_f64() - 1.0).abs());
    }
    Ok(Check {
        name: "reciprocal-lut",
        passed: worst <= 2f64.powi(-10),
        detail: format!("max relative error {worst:.4e}"),
    })
}

fn latency() -> Check {
    let cycles = latency_cycles(3, 8, 27);
    let us = latency_seconds(cycles, 258e6) * 1e6;
    Check {
        name: "latency-model",
        passed: cycles == 795 && (us - 3.08).abs() < 0.01,
        detail: format!("{cycles} cycles, {us:.3} us at 258 MHz"),
    }
}

/// Runs every fast check.
pub fn run_fast() -> Result<Vec<Check>> {
    let con = build_constellation(Scheme::Qam64);
    let mut checks = vec![ocd_matches_cd(&con)?];
    checks.extend(residual_and_descent(&con)?);
    checks.push(mmse_convergence(&con)?);
    checks.push(counts(&con)?);
    checks.push(lut_bound()?);
    checks.push(latency());
    Ok(checks)
}
