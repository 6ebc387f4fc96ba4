//! Equivalent rectangular bandwidth and the ERB-rate frequency scale.
//!
//! The bandwidth model is `ERB(f) = 24.7 + f / 9.265`. Integrating `1/ERB(f)`
//! over frequency gives the ERB-rate scale
//! `E(f) = 9.265 * ln(1 + f / (24.7 * 9.265))`, on which neighbouring auditory
//! filters sit one unit apart.

use crate::error::{Error, Result};

/// Minimum bandwidth in Hz (the ERB at 0 Hz).
pub const ERB_MIN_BANDWIDTH_HZ: f64 = 24.7;
/// Slope divisor of the linear bandwidth model.
pub const ERB_Q: f64 = 9.265;

/// A non-negative, finite frequency in Hz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FrequencyHz(f64);

impl FrequencyHz {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Domain(format!(
                "frequency must be finite and non-negative, got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FrequencyHz {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

/// A position on the ERB-rate scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ErbScaleValue(f64);

impl ErbScaleValue {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Domain(format!(
                "ERB-scale value must be finite and non-negative, got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Bandwidth in Hz of the auditory filter centred at `fc`.
pub fn erb_bandwidth(fc: FrequencyHz) -> f64 {
    ERB_MIN_BANDWIDTH_HZ + fc.0 / ERB_Q
}

pub fn hz_to_erbscale(f: FrequencyHz) -> ErbScaleValue {
    // ln_1p keeps precision for small f.
    ErbScaleValue(ERB_Q * (f.0 / (ERB_MIN_BANDWIDTH_HZ * ERB_Q)).ln_1p())
}

pub fn erbscale_to_hz(e: ErbScaleValue) -> FrequencyHz {
    FrequencyHz(ERB_MIN_BANDWIDTH_HZ * ERB_Q * (e.0 / ERB_Q).exp_m1())
}

/// The frequency one unit above `f0` on the ERB-rate scale.
pub fn next_center_frequency(f0: FrequencyHz) -> FrequencyHz {
    let e = hz_to_erbscale(f0);
    erbscale_to_hz(ErbScaleValue(e.0 + 1.0))
}

/// ERB-spaced center frequencies starting at `f_low`, stepping one ERB-rate
/// unit at a time while staying at or below `f_high`.
pub fn center_frequencies(f_low: FrequencyHz, f_high: FrequencyHz) -> Result<Vec<FrequencyHz>> {
    if f_low.0 <= 0.0 {
        return Err(Error::Domain(format!(
            "lowest center frequency must be positive, got {}",
            f_low.0
        )));
    }
    if f_low.0 > f_high.0 {
        return Err(Error::Domain(format!(
            "lowest center frequency {} Hz exceeds upper limit {} Hz",
            f_low.0, f_high.0
        )));
    }
    let mut out = vec![f_low];
    loop {
        let next = next_center_frequency(*out.last().unwrap());
        if next.0 > f_high.0 {
            break;
        }
        out.push(next);
    }
    Ok(out)
}
