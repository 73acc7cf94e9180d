//! Coordinate-descent data detection for massive MU-MIMO-OFDM uplinks.
//!
//! The crate covers the signal chain of one subcarrier `y = H s + n`:
//!
//! * [`modem`]: constellations with Gray labels, slicing, box projection and
//!   max-log LLRs;
//! * [`channel`]: i.i.d. Rayleigh channels, noise and Eb/N0 bookkeeping;
//! * [`detect`]: exact MMSE, naive coordinate descent and optimized
//!   coordinate descent (OCD) equalizers in MMSE and BOX modes;
//! * [`fxp`]: an integer-only model of the fixed-point OCD datapath;
//! * [`sim`]: the Monte-Carlo sweep harness and its CSV report.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Dense linear algebra reads best with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod channel;
pub mod detect;
pub mod error;
pub mod fxp;
pub mod linalg;
pub mod modem;
pub mod sim;
pub mod verify;

pub use num_complex::Complex64;

pub use channel::{gen_channel, gen_noise, n0_from_ebn0, transmit, ChannelInstance};
pub use detect::{
    cd_reference, gram_and_mf, mmse_exact, multiplication_count_cd, multiplication_count_ocd, objective_value,
    ocd_detect, ocd_equalize, ocd_preprocess, DetectorMode, EqualizerOutput, OcdPreprocessed,
};
pub use error::{Error, Result};
pub use fxp::{latency_cycles, latency_seconds, ocd_fixed, FixedPointFormat, ReciprocalLut};
pub use linalg::CMatrix;
pub use modem::{build_constellation, llr_maxlog, map_bits, project_box, slice_hard, Constellation, LlrVector, Scheme};
pub use sim::{emit_csv, run_sweep, run_trial, Detector, SimConfig, SimReport, TrialCounts};
