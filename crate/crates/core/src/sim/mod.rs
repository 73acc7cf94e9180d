//! Monte-Carlo harness: trial generation, detector dispatch, error counting,
//! Eb/N0 sweeps and CSV reporting.
//!
//! Each trial is one subcarrier. Its random streams (bits, channel, noise)
//! derive from `(master_seed, grid point, trial)` only, so every detector and
//! iteration count sees the same realizations, and results do not depend on
//! how trials are scheduled across workers.

mod config;
mod report;

pub use config::{Detector, SimConfig};
pub use report::{emit_csv, format_g9, write_csv, ReportRow, SimReport, CSV_HEADER};

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::channel::{derive_seed, gen_channel, gen_noise, n0_from_ebn0, transmit};
use crate::detect::{cd_reference, mmse_exact, ocd_detect, EqualizerOutput};
use crate::error::{Error, Result};
use crate::fxp::ocd_fixed;
use crate::linalg::norm_sq;
use crate::modem::{build_constellation, map_bits, Constellation};

/// Error counts of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialCounts {
    pub bits: u64,
    pub bit_errors: u64,
    pub symbols: u64,
    pub symbol_errors: u64,
    /// `|z - z_mmse| / |z_mmse|`
    pub dist_to_mmse: f64,
    pub mult_count: u64,
}

const STREAM_BITS: u64 = 0;
const STREAM_CHANNEL: u64 = 1;
const STREAM_NOISE: u64 = 2;

/// Seed of trial `trial` at grid point `point`.
pub fn trial_seed(master_seed: u64, point: usize, trial: u64) -> u64 {
    derive_seed(master_seed, &[point as u64, trial])
}

fn run_detector(
    cfg: &SimConfig,
    con: &Constellation,
    h: &crate::linalg::CMatrix,
    y: &[Complex64],
    n0: f64,
) -> Result<EqualizerOutput> {
    let k = cfg.k;
    match cfg.detector {
        Detector::ExactMmse => mmse_exact(h, y, n0, con),
        Detector::CdMmse | Detector::CdBox => {
            let mode = cfg.detector.mode().expect("iterative detector");
            let (z, mults) = cd_reference(h, y, n0, mode, k, con)?;
            let norms: Vec<f64> = (0..h.cols()).map(|u| norm_sq(h.col(u))).collect();
            let mu = crate::detect::approximate_gains(&norms, n0);
            EqualizerOutput::from_gains(z, mu, con, k, mults)
        }
        Detector::OcdMmse | Detector::OcdBox => {
            ocd_detect(h, y, n0, cfg.detector.mode().expect("iterative detector"), k, con)
        }
        Detector::OcdMmseFxp | Detector::OcdBoxFxp => {
            let mode = cfg.detector.mode().expect("iterative detector");
            let out = ocd_fixed(h, y, n0, mode, k, con, cfg.fixed_format())?;
            let norms: Vec<f64> = (0..h.cols()).map(|u| norm_sq(h.col(u))).collect();
            let mu = crate::detect::approximate_gains(&norms, n0);
            EqualizerOutput::from_gains(out.z, mu, con, k, out.mult_count)
        }
    }
}

/// Runs one trial at grid point `point`.
pub fn run_trial(cfg: &SimConfig, point: usize, trial: u64) -> Result<TrialCounts> {
    let ebn0_db = *cfg
        .ebn0_grid
        .get(point)
        .ok_or_else(|| Error::Configuration(format!("grid point {point} out of range")))?;
    let con = build_constellation(cfg.scheme);
    run_trial_with(cfg, &con, point, ebn0_db, trial).map_err(|e| Error::Trial {
        detector: cfg.detector.to_string(),
        ebn0_db,
        trial,
        source: Box::new(e),
    })
}

fn run_trial_with(
    cfg: &SimConfig,
    con: &Constellation,
    point: usize,
    ebn0_db: f64,
    trial: u64,
) -> Result<TrialCounts> {
    let q = con.bits_per_symbol();
    let seed = trial_seed(cfg.master_seed, point, trial);
    let mut bit_rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, &[STREAM_BITS]));
    let bits: Vec<u8> = (0..cfg.u * q).map(|_| u8::from(bit_rng.random::<bool>())).collect();
    let s = map_bits(&bits, con)?;
    let h = gen_channel(cfg.b, cfg.u, derive_seed(seed, &[STREAM_CHANNEL]))?;
    let n0 = n0_from_ebn0(ebn0_db, q, cfg.u, cfg.b);
    let n = gen_noise(cfg.b, n0, derive_seed(seed, &[STREAM_NOISE]))?;
    let y = transmit(&h, &s, &n)?;

    let out = run_detector(cfg, con, &h, &y, n0)?;
    let reference = if cfg.detector == Detector::ExactMmse {
        out.z.clone()
    } else {
        mmse_exact(&h, &y, n0, con)?.z
    };

    let hard = out.llrs.hard_bits();
    let bit_errors = hard.iter().zip(&bits).filter(|(a, b)| a != b).count() as u64;
    let symbol_errors = out
        .hard_symbols(con)
        .iter()
        .zip(&s)
        .filter(|(a, b)| a != b)
        .count() as u64;
    let diff: f64 = out.z.iter().zip(&reference).map(|(a, b)| (a - b).norm_sqr()).sum();
    let base = norm_sq(&reference);
    let dist_to_mmse = if base > 0.0 {
        (diff / base).sqrt()
    } else {
        diff.sqrt()
    };
    Ok(TrialCounts {
        bits: bits.len() as u64,
        bit_errors,
        symbols: cfg.u as u64,
        symbol_errors,
        dist_to_mmse,
        mult_count: out.mult_count,
    })
}

/// Runs every grid point. Trials execute on `cfg.workers` threads and are
/// reduced in trial order.
pub fn run_sweep(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Configuration(format!("worker pool: {e}")))?;
    let con = build_constellation(cfg.scheme);

    let mut rows = Vec::with_capacity(cfg.ebn0_grid.len());
    for (point, &ebn0_db) in cfg.ebn0_grid.iter().enumerate() {
        let start = Instant::now();
        let trials: Vec<Result<TrialCounts>> = pool.install(|| {
            (0..cfg.trials_per_point)
                .into_par_iter()
                .map(|t| run_trial_with(cfg, &con, point, ebn0_db, t))
                .collect()
        });
        let mut total = TrialCounts::default();
        let mut dist_sum = 0.0;
        let mut mult_sum = 0u128;
        for (t, res) in trials.into_iter().enumerate() {
            let c = res.map_err(|e| Error::Trial {
                detector: cfg.detector.to_string(),
                ebn0_db,
                trial: t as u64,
                source: Box::new(e),
            })?;
            total.bits += c.bits;
            total.bit_errors += c.bit_errors;
            total.symbols += c.symbols;
            total.symbol_errors += c.symbol_errors;
            dist_sum += c.dist_to_mmse;
            mult_sum += c.mult_count as u128;
        }
        let n = cfg.trials_per_point as f64;
        let wall_seconds = if cfg.record_wall_time {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        rows.push(ReportRow {
            detector: cfg.detector,
            ebn0_db,
            k: cfg.k,
            bits: total.bits,
            bit_errors: total.bit_errors,
            ber: total.bit_errors as f64 / total.bits as f64,
            symbols: total.symbols,
            symbol_errors: total.symbol_errors,
            ser: total.symbol_errors as f64 / total.symbols as f64,
            mean_dist_to_mmse: dist_sum / n,
            mean_mult_count: mult_sum as f64 / n,
            wall_seconds,
        });
    }
    Ok(SimReport { rows })
}
