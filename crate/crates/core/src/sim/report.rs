use std::io::Write;
use std::path::Path;

use super::config::Detector;
use crate::error::Result;

pub const CSV_HEADER: &str =
    "detector,ebn0_db,K,bits,bit_errors,ber,symbols,symbol_errors,ser,mean_dist_to_mmse,mean_mult_count,wall_seconds";

/// Aggregates of one (detector, Eb/N0, K) point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub detector: Detector,
    pub ebn0_db: f64,
    pub k: usize,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub symbols: u64,
    pub symbol_errors: u64,
    pub ser: f64,
    pub mean_dist_to_mmse: f64,
    pub mean_mult_count: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimReport {
    pub rows: Vec<ReportRow>,
}

impl SimReport {
    /// Concatenates reports, e.g. sweeps of several detectors.
    pub fn merge(reports: impl IntoIterator<Item = SimReport>) -> SimReport {
        SimReport {
            rows: reports.into_iter().flat_map(|r| r.rows).collect(),
        }
    }
}

/// Formats like C's `%.9g`: nine significant digits, trailing zeros
/// dropped, scientific notation outside `[1e-4, 1e9)`.
pub fn format_g9(x: f64) -> String {
    const P: i32 = 9;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the report as CSV (LF line endings).
pub fn write_csv<W: Write>(report: &SimReport, mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.detector,
            format_g9(r.ebn0_db),
            r.k,
            r.bits,
            r.bit_errors,
            format_g9(r.ber),
            r.symbols,
            r.symbol_errors,
            format_g9(r.ser),
            format_g9(r.mean_dist_to_mmse),
            format_g9(r.mean_mult_count),
            format_g9(r.wall_seconds),
        )?;
    }
    Ok(())
}

pub fn emit_csv(report: &SimReport, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(report, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}
