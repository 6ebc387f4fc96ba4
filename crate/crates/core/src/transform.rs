//! Framed analysis and synthesis.
//!
//! Encoding takes frames of `L` samples every `D` samples and correlates
//! each with every analysis filter read back to front:
//!
//! ```text
//! X[n][i] = sum_{l=0}^{L-1} x[i*D + l] * h_n[L-1-l]
//! ```
//!
//! Decoding forms one synthesis frame per column and overlap-adds them:
//!
//! ```text
//! y_i[l] = sum_n X[n][i] * d_n[l]
//! x_hat[k] = sum_i y_i[k - i*D]
//! ```
//!
//! Decoder row `n` always pairs with encoder row `n`. Only complete frames
//! are encoded, so reconstruction guarantees hold on `[L, T-L)`.

use nalgebra::DMatrix;

use crate::audio_io::AudioSignal;
use crate::error::{Error, Result};
use crate::mpgtf::{BankKind, Filter, Filterbank};

pub const DEFAULT_FRAME_SHIFT: usize = 8;

/// Singular-value ratio below which a bank is treated as rank deficient.
pub const PINV_RANK_TOLERANCE: f64 = 1e-10;

/// `N x I` encoder output (filter index by frame index).
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSignal {
    values: DMatrix<f64>,
    frame_shift: usize,
    frame_length: usize,
    sample_rate: u32,
}

impl EncodedSignal {
    pub fn new(values: DMatrix<f64>, frame_shift: usize, frame_length: usize, sample_rate: u32) -> Result<Self> {
        if frame_shift == 0 || frame_length == 0 {
            return Err(Error::Domain("frame shift and frame length must be positive".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("encoded values must be finite".into()));
        }
        Ok(Self {
            values,
            frame_shift,
            frame_length,
            sample_rate,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn n_filters(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_frames(&self) -> usize {
        self.values.ncols()
    }

    pub fn frame_shift(&self) -> usize {
        self.frame_shift
    }

    pub fn frame_length(&self) -> usize {
        self.frame_length
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    fn with_values(&self, values: DMatrix<f64>) -> Self {
        Self { values, ..*self }
    }
}

/// Non-negative `N x I` gain matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    values: DMatrix<f64>,
}

impl Mask {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        for ((row, col), &value) in indexed(&values) {
            if value.is_nan() || value < 0.0 || value.is_infinite() {
                return Err(Error::NegativeMask { row, col, value });
            }
        }
        Ok(Self { values })
    }

    pub fn ones(n_filters: usize, n_frames: usize) -> Self {
        Self {
            values: DMatrix::from_element(n_filters, n_frames, 1.0),
        }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }
}

fn indexed(m: &DMatrix<f64>) -> impl Iterator<Item = ((usize, usize), &f64)> {
    let rows = m.nrows();
    m.iter().enumerate().map(move |(k, v)| ((k % rows, k / rows), v))
}

/// A synthesis filterbank whose row `n` pairs with analysis row `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderBank(Filterbank);

impl DecoderBank {
    pub fn new(bank: Filterbank) -> Result<Self> {
        if bank.kind() != BankKind::Synthesis {
            return Err(Error::InvalidBank("decoder bank must be of kind synthesis".into()));
        }
        Ok(Self(bank))
    }

    pub fn bank(&self) -> &Filterbank {
        &self.0
    }

    pub fn into_bank(self) -> Filterbank {
        self.0
    }
}

/// Number of complete frames of length `frame_length` at hop `frame_shift`.
pub fn frame_count(signal_len: usize, frame_length: usize, frame_shift: usize) -> usize {
    if signal_len < frame_length || frame_shift == 0 {
        0
    } else {
        (signal_len - frame_length) / frame_shift + 1
    }
}

pub fn encode(x: &AudioSignal, bank: &Filterbank, frame_shift: usize) -> Result<EncodedSignal> {
    if frame_shift == 0 {
        return Err(Error::Domain("frame shift must be positive".into()));
    }
    if x.sample_rate() != bank.sample_rate() {
        return Err(Error::SampleRateMismatch(x.sample_rate(), bank.sample_rate()));
    }
    let len = bank.filter_length();
    if x.len() < len {
        return Err(Error::SignalTooShort { len: x.len(), min: len });
    }
    let n_frames = frame_count(x.len(), len, frame_shift);
    let samples = x.samples();
    // Columns are frames; rows of `reversed` are time-reversed filters.
    let frames = DMatrix::from_fn(len, n_frames, |l, i| samples[i * frame_shift + l]);
    let reversed = DMatrix::from_fn(bank.n_filters(), len, |n, l| bank.filters()[n].coeffs[len - 1 - l]);
    EncodedSignal::new(reversed * frames, frame_shift, len, bank.sample_rate())
}

/// Element-wise `max(0, X)`.
pub fn rectify(x: &EncodedSignal) -> EncodedSignal {
    x.with_values(x.values.map(|v| v.max(0.0)))
}

pub fn apply_mask(x: &EncodedSignal, mask: &Mask) -> Result<EncodedSignal> {
    if x.values.shape() != mask.values.shape() {
        return Err(Error::DimensionMismatch(format!(
            "encoded signal is {:?} but mask is {:?}",
            x.values.shape(),
            mask.values.shape()
        )));
    }
    Ok(x.with_values(x.values.component_mul(&mask.values)))
}

/// Synthesizes and overlap-adds frames, returning exactly `output_length`
/// samples (truncating or zero-padding the tail).
pub fn decode(x: &EncodedSignal, dec: &DecoderBank, output_length: usize) -> Result<AudioSignal> {
    let bank = dec.bank();
    if x.n_filters() != bank.n_filters() {
        return Err(Error::DimensionMismatch(format!(
            "encoded signal has {} filters, decoder has {}",
            x.n_filters(),
            bank.n_filters()
        )));
    }
    if x.frame_length != bank.filter_length() {
        return Err(Error::DimensionMismatch(format!(
            "frame length {} does not match decoder filter length {}",
            x.frame_length,
            bank.filter_length()
        )));
    }
    if x.sample_rate != bank.sample_rate() {
        return Err(Error::SampleRateMismatch(x.sample_rate, bank.sample_rate()));
    }
    let len = bank.filter_length();
    // L x N, column n is decoder row n.
    let synthesis = DMatrix::from_fn(len, bank.n_filters(), |l, n| bank.filters()[n].coeffs[l]);
    let frames = synthesis * &x.values;
    let mut out = vec![0.0; output_length];
    for (i, frame) in frames.column_iter().enumerate() {
        let start = i * x.frame_shift;
        if start >= output_length {
            break;
        }
        for (o, v) in out[start..].iter_mut().zip(frame.iter()) {
            *o += v;
        }
    }
    AudioSignal::new(out, x.sample_rate)
}

/// Builds the decoder from the Moore-Penrose pseudo-inverse of the analysis
/// bank, so that decoding an unrectified encoding reproduces every frame.
///
/// The pseudo-inverse is formed from the SVD of the time-reversed `N x L`
/// analysis matrix; the bank must have full column rank.
pub fn pseudo_inverse_decoder(enc: &Filterbank) -> Result<DecoderBank> {
    let len = enc.filter_length();
    let n = enc.n_filters();
    if n < len {
        return Err(Error::RankDeficient {
            smallest: 0.0,
            largest: f64::NAN,
        });
    }
    let reversed = DMatrix::from_fn(n, len, |r, l| enc.filters()[r].coeffs[len - 1 - l]);
    let svd = reversed.svd(true, true);
    let largest = svd.singular_values.max();
    let smallest = svd.singular_values.min();
    if largest.is_nan() || largest <= 0.0 || smallest < PINV_RANK_TOLERANCE * largest {
        return Err(Error::RankDeficient { smallest, largest });
    }
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    // pinv = V * diag(1/s) * U^T, shape L x N.
    let mut scaled_u_t = u.transpose();
    for (mut row, s) in scaled_u_t.row_iter_mut().zip(svd.singular_values.iter()) {
        row /= *s;
    }
    let pinv = v_t.transpose() * scaled_u_t;
    let filters = enc
        .filters()
        .iter()
        .enumerate()
        .map(|(row, f)| Filter {
            spec: f.spec,
            coeffs: pinv.column(row).iter().copied().collect(),
        })
        .collect();
    let bank = Filterbank::from_filters(
        filters,
        enc.sample_rate(),
        enc.f_low_hz(),
        enc.f_high_hz(),
        BankKind::Synthesis,
    )?;
    DecoderBank::new(bank)
}

/// Runs encode, rectify, unit mask and pseudo-inverse decode, returning a
/// signal of the input's length.
pub fn pinv_round_trip(x: &AudioSignal, enc: &Filterbank, frame_shift: usize) -> Result<AudioSignal> {
    let dec = pseudo_inverse_decoder(enc)?;
    let encoded = rectify(&encode(x, enc, frame_shift)?);
    let masked = apply_mask(&encoded, &Mask::ones(encoded.n_filters(), encoded.n_frames()))?;
    decode(&masked, &dec, x.len())
}

/// The reconstructable interior `[L, T-L)` of a signal, or the whole signal if
/// it is too short to have one.
pub fn interior(samples: &[f64], frame_length: usize) -> &[f64] {
    if samples.len() > 2 * frame_length {
        &samples[frame_length..samples.len() - frame_length]
    } else {
        samples
    }
}
