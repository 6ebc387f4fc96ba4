//! Sampled, truncated gammatone impulse responses.
//!
//! A real gammatone filter has the impulse response
//!
//! ```text
//! g(t) = a * t^(p-1) * exp(-2*pi*b*t) * cos(2*pi*fc*t + phi),   t > 0
//! ```
//!
//! Coefficients are sampled at `t_l = (l + 1) / fs` for `l = 0..L`, so the first
//! tap is never forced to zero by the `t^(p-1)` factor.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::erb::{erb_bandwidth, FrequencyHz};
use crate::error::{Error, Result};

/// Zero-padded transform size used to locate the spectral peak.
pub const PEAK_GRID_FFT_SIZE: usize = 1024;

/// Order of the multi-phase gammatone filters.
pub const MPGTF_ORDER: u32 = 2;

/// Ratio between ERB and the bandwidth parameter for order-2 gammatones.
pub const MPGTF_BANDWIDTH_DIVISOR: f64 = 1.57;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub center_hz: f64,
    /// Phase shift in radians, in `[0, 2*pi)`.
    pub phase_rad: f64,
    pub order: u32,
    pub bandwidth_hz: f64,
    /// Set on the pi-shifted partner of a filter.
    pub inverted: bool,
    /// Amplitude applied by peak normalization; 1 before normalization.
    pub amplitude: f64,
}

impl FilterSpec {
    pub fn new(center_hz: f64, phase_rad: f64, order: u32, bandwidth_hz: f64) -> Result<Self> {
        if !center_hz.is_finite() || center_hz < 0.0 {
            return Err(Error::Domain(format!("invalid center frequency {center_hz}")));
        }
        if !phase_rad.is_finite() {
            return Err(Error::Domain(format!("invalid phase {phase_rad}")));
        }
        if order == 0 {
            return Err(Error::Domain("filter order must be positive".into()));
        }
        if !bandwidth_hz.is_finite() || bandwidth_hz < 0.0 {
            return Err(Error::Domain(format!("invalid bandwidth {bandwidth_hz}")));
        }
        Ok(Self {
            center_hz,
            phase_rad: phase_rad.rem_euclid(TAU),
            order,
            bandwidth_hz,
            inverted: false,
            amplitude: 1.0,
        })
    }

    /// Order-2 filter at `fc` with bandwidth `ERB(fc) / 1.57`.
    pub fn mpgtf(fc: FrequencyHz, phase_rad: f64) -> Result<Self> {
        Self::new(
            fc.value(),
            phase_rad,
            MPGTF_ORDER,
            erb_bandwidth(fc) / MPGTF_BANDWIDTH_DIVISOR,
        )
    }

    /// The same filter shifted by pi, flagged as inverted.
    pub fn inverted_partner(&self) -> Self {
        Self {
            phase_rad: (self.phase_rad + PI).rem_euclid(TAU),
            inverted: !self.inverted,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoefficients {
    pub coeffs: Vec<f64>,
    pub sample_rate: u32,
}

impl FilterCoefficients {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Samples the gammatone impulse response of `spec` (with amplitude 1).
pub fn gammatone_impulse_response(
    spec: &FilterSpec,
    sample_rate: u32,
    length_samples: usize,
) -> Result<FilterCoefficients> {
    if sample_rate == 0 {
        return Err(Error::Domain("sample rate must be positive".into()));
    }
    if length_samples == 0 {
        return Err(Error::Domain("filter length must be at least one sample".into()));
    }
    let fs = f64::from(sample_rate);
    let exponent = (spec.order - 1) as i32;
    let coeffs = (0..length_samples)
        .map(|l| {
            let t = (l + 1) as f64 / fs;
            t.powi(exponent)
                * (-TAU * spec.bandwidth_hz * t).exp()
                * (TAU * spec.center_hz * t + spec.phase_rad).cos()
        })
        .collect();
    Ok(FilterCoefficients { coeffs, sample_rate })
}

/// Magnitude of the DFT of `coeffs` zero-padded to `nfft` points, for bins
/// `0..=nfft/2` (DC up to Nyquist).
pub fn magnitude_response(coeffs: &[f64], nfft: usize) -> Vec<f64> {
    let nfft = nfft.max(coeffs.len()).max(2);
    let mut buf: Vec<Complex<f64>> = coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect();
    buf.resize(nfft, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    buf[..=nfft / 2].iter().map(|c| c.norm()).collect()
}

/// Largest magnitude of the frequency response over the dense grid.
pub fn spectral_peak(coeffs: &[f64]) -> f64 {
    let nfft = PEAK_GRID_FFT_SIZE.max(coeffs.len().next_power_of_two());
    magnitude_response(coeffs, nfft)
        .into_iter()
        .fold(0.0, f64::max)
}

/// Scales `coeffs` so that the peak of its magnitude response is 1.
///
/// Returns the scaled coefficients and the applied amplitude. The peak of the
/// result never exceeds 1 on the evaluation grid.
pub fn normalize_frequency_peak(coeffs: &FilterCoefficients) -> Result<(FilterCoefficients, f64)> {
    if coeffs.coeffs.iter().all(|&c| c == 0.0) {
        return Err(Error::DegenerateFilter);
    }
    let peak = spectral_peak(&coeffs.coeffs);
    let mut amplitude = 1.0 / peak;
    let mut scaled = scale(&coeffs.coeffs, amplitude);
    // Rounding can leave the rescaled peak one ulp above 1.
    while spectral_peak(&scaled) > 1.0 {
        amplitude *= 1.0 - f64::EPSILON;
        scaled = scale(&coeffs.coeffs, amplitude);
    }
    Ok((
        FilterCoefficients {
            coeffs: scaled,
            sample_rate: coeffs.sample_rate,
        },
        amplitude,
    ))
}

fn scale(coeffs: &[f64], by: f64) -> Vec<f64> {
    coeffs.iter().map(|c| c * by).collect()
}

/// Builds the normalized filter for `spec`, recording the amplitude in the
/// returned spec.
pub fn normalized_gammatone(
    spec: &FilterSpec,
    sample_rate: u32,
    length_samples: usize,
) -> Result<(FilterSpec, FilterCoefficients)> {
    let raw = gammatone_impulse_response(spec, sample_rate, length_samples)?;
    let (coeffs, amplitude) = normalize_frequency_peak(&raw)?;
    Ok((FilterSpec { amplitude, ..*spec }, coeffs))
}
