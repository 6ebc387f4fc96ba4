//! Mono audio signals, PCM16 WAV I/O and deterministic test signals.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const PCM16_SCALE: f64 = 32768.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Domain("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Domain(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean squared sample value.
    pub fn power(&self) -> f64 {
        power(&self.samples)
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            sample_rate: self.sample_rate,
        }
    }

    pub fn truncated(&self, len: usize) -> Self {
        Self {
            samples: self.samples[..len.min(self.samples.len())].to_vec(),
            sample_rate: self.sample_rate,
        }
    }
}

fn power(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// Reads a PCM16 mono WAV file; samples are scaled by 1/32768.
pub fn read_wav<P: AsRef<Path>>(path: P) -> Result<AudioSignal> {
    let reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "{} channels, only mono is supported",
            spec.channels
        )));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedFormat(format!(
            "{:?} {}-bit samples, only 16-bit PCM is supported",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| f64::from(v) / PCM16_SCALE))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    AudioSignal::new(samples, spec.sample_rate)
}

/// Writes `sig` as PCM16 mono.
///
/// With `peak_normalize`, the signal is scaled so its largest magnitude maps
/// to the largest positive PCM16 value; otherwise any sample outside [-1, 1]
/// is an error.
pub fn write_wav<P: AsRef<Path>>(path: P, sig: &AudioSignal, peak_normalize: bool) -> Result<()> {
    let gain = if peak_normalize {
        let peak = sig.samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        if peak > 0.0 {
            (PCM16_SCALE - 1.0) / PCM16_SCALE / peak
        } else {
            1.0
        }
    } else {
        if let Some((index, &value)) = sig
            .samples
            .iter()
            .enumerate()
            .find(|(_, s)| s.abs() > 1.0)
        {
            return Err(Error::SampleOutOfRange { index, value });
        }
        1.0
    };
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: sig.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for s in &sig.samples {
        let q = (s * gain * PCM16_SCALE).round().clamp(-PCM16_SCALE, PCM16_SCALE - 1.0);
        writer.write_sample(q as i16)?;
    }
    writer.finalize()?;
    Ok(())
}

/// A two-source mixture and the constituents that were summed.
#[derive(Debug, Clone)]
pub struct Mixture {
    pub mixture: AudioSignal,
    pub s1: AudioSignal,
    pub s2: AudioSignal,
}

/// Scales `s2` so that `10*log10(P(s1)/P(s2')) = snr_db` and adds it to `s1`.
/// Both inputs are truncated to the shorter length first.
pub fn mix_at_snr(s1: &AudioSignal, s2: &AudioSignal, snr_db: f64) -> Result<Mixture> {
    if s1.sample_rate != s2.sample_rate {
        return Err(Error::SampleRateMismatch(s1.sample_rate, s2.sample_rate));
    }
    if !snr_db.is_finite() {
        return Err(Error::Domain(format!("SNR must be finite, got {snr_db}")));
    }
    let len = s1.len().min(s2.len());
    let s1 = s1.truncated(len);
    let s2 = s2.truncated(len);
    let (p1, p2) = (s1.power(), s2.power());
    if p1 == 0.0 || p2 == 0.0 {
        return Err(Error::ZeroPower);
    }
    let gain = (p1 / p2 / 10f64.powf(snr_db / 10.0)).sqrt();
    let s2 = if gain == 1.0 { s2 } else { s2.scaled(gain) };
    let mixture = s1
        .samples
        .iter()
        .zip(&s2.samples)
        .map(|(a, b)| a + b)
        .collect();
    Ok(Mixture {
        mixture: AudioSignal::new(mixture, s1.sample_rate)?,
        s1,
        s2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalKind {
    Sine { freq_hz: f64 },
    /// Linear-frequency sweep from 100 Hz to 4000 Hz over the signal length.
    Sweep,
    /// Uniform white noise in [-0.5, 0.5).
    Noise,
}

pub const TEST_SIGNAL_AMPLITUDE: f64 = 0.5;
const SWEEP_START_HZ: f64 = 100.0;
const SWEEP_END_HZ: f64 = 4000.0;

/// Deterministic test signal. Only `Noise` depends on `seed`.
pub fn synth_test_signal(kind: SignalKind, seed: u64, length: usize, sample_rate: u32) -> Result<AudioSignal> {
    if length == 0 {
        return Err(Error::Domain("signal length must be at least one sample".into()));
    }
    if sample_rate == 0 {
        return Err(Error::Domain("sample rate must be positive".into()));
    }
    let fs = f64::from(sample_rate);
    let samples: Vec<f64> = match kind {
        SignalKind::Sine { freq_hz } => (0..length)
            .map(|n| TEST_SIGNAL_AMPLITUDE * (TAU * freq_hz * n as f64 / fs).sin())
            .collect(),
        SignalKind::Sweep => {
            let duration = length as f64 / fs;
            let rate = (SWEEP_END_HZ - SWEEP_START_HZ) / duration;
            (0..length)
                .map(|n| {
                    let t = n as f64 / fs;
                    let phase = TAU * (SWEEP_START_HZ * t + 0.5 * rate * t * t);
                    TEST_SIGNAL_AMPLITUDE * phase.sin()
                })
                .collect()
        }
        SignalKind::Noise => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..length)
                .map(|_| rng.random_range(-TEST_SIGNAL_AMPLITUDE..TEST_SIGNAL_AMPLITUDE))
                .collect()
        }
    };
    AudioSignal::new(samples, sample_rate)
}
