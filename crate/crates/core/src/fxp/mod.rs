//! Bit-accurate model of the fixed-point OCD datapath.
//!
//! Signals are stored as raw two's-complement integers with an implied
//! binary point. All arithmetic in the datapath is integer-only, so results
//! are identical on every platform.

mod datapath;
mod format;
mod latency;
mod lut;

pub use datapath::{ceil_log2, inner_product_acc, inner_product_shifted, ocd_fixed, CFixed, FixedOcdOutput};
pub use format::{quantize, Fixed, FixedPointFormat, ACCUMULATOR_BITS};
pub use latency::{latency_cycles, latency_seconds, PIPELINE_STAGES};
pub use lut::{recip_lut, ReciprocalLut, LUT_ENTRIES, LUT_FRAC_BITS, LUT_INDEX_BITS, LUT_WORD_BITS};
