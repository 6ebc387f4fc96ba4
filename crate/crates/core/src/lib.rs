//! Multi-phase gammatone filterbank (MP-GTF) and the framed
//! analysis/masking/synthesis pipeline around it.
//!
//! - [`erb`]: ERB bandwidth and ERB-rate frequency placement.
//! - [`gammatone`]: truncated, peak-normalized gammatone impulse responses.
//! - [`mpgtf`]: filterbank assembly, phase allocation and serialization.
//! - [`transform`]: encoder, rectification, masking, decoder, pseudo-inverse.
//! - [`metrics`]: SI-SNR and SI-SNR improvement.
//! - [`audio_io`]: PCM16 WAV I/O, mixing and test signals.
//! - [`oracle`]: oracle ratio-mask separation demo.
//! - [`cli`], [`report`]: command-line surface and JSON run reports.

pub mod audio_io;
pub mod cli;
pub mod erb;
pub mod error;
pub mod gammatone;
pub mod metrics;
pub mod mpgtf;
pub mod oracle;
pub mod report;
pub mod transform;

pub use audio_io::AudioSignal;
pub use error::{Error, Result};
pub use mpgtf::{build_mpgtf, Filterbank, MpgtfConfig};
pub use transform::{decode, encode, pseudo_inverse_decoder, rectify, DecoderBank, EncodedSignal, Mask};
