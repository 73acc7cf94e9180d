use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detect::DetectorMode;
use crate::error::{Error, Result};
use crate::fxp::FixedPointFormat;
use crate::modem::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    ExactMmse,
    CdMmse,
    CdBox,
    OcdMmse,
    OcdBox,
    OcdMmseFxp,
    OcdBoxFxp,
}

impl Detector {
    pub const ALL: [Detector; 7] = [
        Detector::ExactMmse,
        Detector::CdMmse,
        Detector::CdBox,
        Detector::OcdMmse,
        Detector::OcdBox,
        Detector::OcdMmseFxp,
        Detector::OcdBoxFxp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Detector::ExactMmse => "exact_mmse",
            Detector::CdMmse => "cd_mmse",
            Detector::CdBox => "cd_box",
            Detector::OcdMmse => "ocd_mmse",
            Detector::OcdBox => "ocd_box",
            Detector::OcdMmseFxp => "ocd_mmse_fxp",
            Detector::OcdBoxFxp => "ocd_box_fxp",
        }
    }

    /// Regularizer of an iterative detector; `None` for the exact one.
    pub fn mode(self) -> Option<DetectorMode> {
        match self {
            Detector::ExactMmse => None,
            Detector::CdMmse | Detector::OcdMmse | Detector::OcdMmseFxp => Some(DetectorMode::Mmse),
            Detector::CdBox | Detector::OcdBox | Detector::OcdBoxFxp => Some(DetectorMode::Box),
        }
    }

    pub fn is_fixed_point(self) -> bool {
        matches!(self, Detector::OcdMmseFxp | Detector::OcdBoxFxp)
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Detector::ALL
            .into_iter()
            .find(|d| d.name() == key)
            .ok_or_else(|| Error::Configuration(format!("unknown detector '{s}'")))
    }
}

/// One sweep: a detector at a fixed iteration count over an Eb/N0 grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub b: usize,
    pub u: usize,
    pub scheme: Scheme,
    pub detector: Detector,
    /// Iterations; ignored by the exact detector.
    pub k: usize,
    /// Eb/N0 points in dB, strictly increasing.
    pub ebn0_grid: Vec<f64>,
    pub trials_per_point: u64,
    pub master_seed: u64,
    /// Datapath format of the fixed-point detectors; 16:11 when unset.
    pub fxp_format: Option<FixedPointFormat>,
    pub workers: usize,
    /// Fill the `wall_seconds` column. Off by default so reports are
    /// reproducible byte for byte.
    pub record_wall_time: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Configuration(m));
        if self.u == 0 || self.b < self.u {
            return fail(format!("need B >= U >= 1, got B = {}, U = {}", self.b, self.u));
        }
        if self.trials_per_point == 0 {
            return fail("trials per point must be at least 1".into());
        }
        if self.ebn0_grid.is_empty() {
            return fail("Eb/N0 grid is empty".into());
        }
        if self.ebn0_grid.iter().any(|x| !x.is_finite()) {
            return fail("Eb/N0 grid contains a non-finite value".into());
        }
        if self.ebn0_grid.windows(2).any(|w| w[1] <= w[0]) {
            return fail("Eb/N0 grid must be strictly increasing".into());
        }
        if self.detector != Detector::ExactMmse && self.k == 0 {
            return fail("iterative detectors need K >= 1".into());
        }
        if self.workers == 0 {
            return fail("need at least one worker".into());
        }
        Ok(())
    }

    pub fn fixed_format(&self) -> FixedPointFormat {
        self.fxp_format.unwrap_or(FixedPointFormat::Q16_11)
    }

    /// Parses `start:step:stop` (inclusive) or a single value into a grid.
    pub fn parse_grid(range: &str) -> Result<Vec<f64>> {
        let bad = || Error::Configuration(format!("Eb/N0 range '{range}' is not <start:step:stop>"));
        let parts: Vec<f64> = range
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [x] => Ok(vec![*x]),
            [start, step, stop] => {
                if !(*step > 0.0) || stop < start {
                    return Err(bad());
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                Ok((0..=n).map(|i| start + i as f64 * step).collect())
            }
            _ => Err(bad()),
        }
    }
}
