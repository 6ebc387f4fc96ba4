//! Oracle-mask separation of a two-source mixture.
//!
//! Stands in for a trained separation network: the masks are computed from
//! the known sources as `m_c = X_c+ / (X_1+ + X_2+ + eps)` on rectified
//! encodings, applied to the rectified mixture encoding, and decoded with
//! the pseudo-inverse decoder.

use nalgebra::DMatrix;

use crate::audio_io::{mix_at_snr, AudioSignal, Mixture};
use crate::error::Result;
use crate::metrics::{cap_db, difference_db, si_snr, DEFAULT_CEILING_DB};
use crate::mpgtf::Filterbank;
use crate::transform::{apply_mask, decode, encode, interior, pseudo_inverse_decoder, rectify, Mask};

pub const MASK_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SourceResult {
    pub estimate: AudioSignal,
    /// Interior SI-SNR of the estimate, capped at the ceiling.
    pub si_snr_db: f64,
    /// Interior SI-SNR of the mixture against this source, capped.
    pub mixture_si_snr_db: f64,
    pub si_snr_improvement_db: f64,
}

#[derive(Debug, Clone)]
pub struct Separation {
    pub mixture: Mixture,
    pub masks: [Mask; 2],
    pub sources: [SourceResult; 2],
}

/// Ratio masks for two rectified source encodings.
pub fn oracle_masks(x1: &DMatrix<f64>, x2: &DMatrix<f64>) -> Result<[Mask; 2]> {
    let denom = (x1 + x2).add_scalar(MASK_EPSILON);
    Ok([
        Mask::new(x1.component_div(&denom))?,
        Mask::new(x2.component_div(&denom))?,
    ])
}

/// Mixes `s1` and `s2` at `snr_db`, separates with oracle masks and scores
/// each estimate on the interior samples.
pub fn oracle_separate(
    s1: &AudioSignal,
    s2: &AudioSignal,
    snr_db: f64,
    bank: &Filterbank,
    frame_shift: usize,
) -> Result<Separation> {
    let mixture = mix_at_snr(s1, s2, snr_db)?;
    let dec = pseudo_inverse_decoder(bank)?;
    let mix_enc = rectify(&encode(&mixture.mixture, bank, frame_shift)?);
    let e1 = rectify(&encode(&mixture.s1, bank, frame_shift)?);
    let e2 = rectify(&encode(&mixture.s2, bank, frame_shift)?);
    let masks = oracle_masks(e1.values(), e2.values())?;

    let len = mixture.mixture.len();
    let l = bank.filter_length();
    let mix_interior = interior(mixture.mixture.samples(), l);
    let score = |mask: &Mask, reference: &AudioSignal| -> Result<SourceResult> {
        let estimate = decode(&apply_mask(&mix_enc, mask)?, &dec, len)?;
        let reference = interior(reference.samples(), l);
        let est_db = cap_db(si_snr(interior(estimate.samples(), l), reference)?, DEFAULT_CEILING_DB);
        let mix_db = cap_db(si_snr(mix_interior, reference)?, DEFAULT_CEILING_DB);
        Ok(SourceResult {
            estimate,
            si_snr_db: est_db,
            mixture_si_snr_db: mix_db,
            si_snr_improvement_db: difference_db(est_db, mix_db),
        })
    };
    let sources = [score(&masks[0], &mixture.s1)?, score(&masks[1], &mixture.s2)?];
    Ok(Separation {
        mixture,
        masks,
        sources,
    })
}
