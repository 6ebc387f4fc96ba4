//! Scale-invariant signal-to-noise ratio.
//!
//! ```text
//! s_target = <s_hat, s> s / ||s||^2
//! e_noise  = s_hat - s_target
//! SI-SNR   = 10 log10(||s_target||^2 / ||e_noise||^2)
//! ```
//!
//! No mean removal is applied. A perfect estimate (zero noise energy) yields
//! `f64::INFINITY`; callers that average should cap it first with
//! [`cap_db`].

use crate::error::{Error, Result};

/// Default ceiling applied to infinite SI-SNR values before aggregation.
pub const DEFAULT_CEILING_DB: f64 = 100.0;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// SI-SNR of `estimate` against `reference` in dB.
pub fn si_snr(estimate: &[f64], reference: &[f64]) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::LengthMismatch(estimate.len(), reference.len()));
    }
    if reference.is_empty() {
        return Err(Error::Domain("signals must contain at least one sample".into()));
    }
    let ref_energy = dot(reference, reference);
    if ref_energy == 0.0 {
        return Err(Error::ZeroPower);
    }
    let alpha = dot(estimate, reference) / ref_energy;
    let mut target_energy = 0.0;
    let mut noise_energy = 0.0;
    for (e, r) in estimate.iter().zip(reference) {
        let t = alpha * r;
        let n = e - t;
        target_energy += t * t;
        noise_energy += n * n;
    }
    if noise_energy == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (target_energy / noise_energy).log10())
}

/// SI-SNR gain of `estimate` over the unprocessed `mixture`.
pub fn si_snr_improvement(estimate: &[f64], mixture: &[f64], reference: &[f64]) -> Result<f64> {
    if mixture.len() != reference.len() {
        return Err(Error::LengthMismatch(mixture.len(), reference.len()));
    }
    let est = si_snr(estimate, reference)?;
    let mix = si_snr(mixture, reference)?;
    Ok(difference_db(est, mix))
}

/// `a - b`, with equal values (including two infinities) giving 0.
pub fn difference_db(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        a - b
    }
}

/// Clamps a dB value to `[-ceiling, ceiling]`.
pub fn cap_db(value: f64, ceiling_db: f64) -> f64 {
    value.clamp(-ceiling_db, ceiling_db)
}

/// Mean of dB values after capping each at `ceiling_db`.
pub fn mean_capped_db(values: &[f64], ceiling_db: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().map(|&v| cap_db(v, ceiling_db)).sum::<f64>() / values.len() as f64)
}
